// Acceptance runner: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <CLI11.hpp>

#include <iostream>

#include "rrg/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string suite = "all";
  std::string json_path;
  app.add_option("--suite", suite, "exact, statistical or all")->check(CLI::IsMember({"exact", "statistical", "all"}));
  app.add_option("--json", json_path, "write the JSON summary here");
  CLI11_PARSE(app, argc, argv);
  bool pass = false;
  const auto summary = rrg::run_acceptance(suite, std::cout, pass);
  if (!json_path.empty()) {
    rrg::OutputFile out(json_path);
    out.stream() << summary.dump(2) << "\n";
  }
  std::cout << "SUITE " << suite << " " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}
