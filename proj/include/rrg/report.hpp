#pragma once

// JSON summaries and CSV helpers.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrg/config.hpp"
#include "rrg/stats.hpp"

namespace rrg {

inline nlohmann::json report_json(const StatReport& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"name", r.name}, {"estimate", num(r.estimate)}, {"se", num(r.se)},
          {"reference", num(r.reference)}, {"z", num(r.z)}, {"pass", r.pass}};
}

/// {experiment, params, reports:[{name, estimate, se, reference, z, pass}]}
inline nlohmann::json summary_json(const std::string& experiment, const nlohmann::json& params,
                                   const std::vector<StatReport>& reports) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params;
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(report_json(r));
  return j;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : cfg.to_map()) j[k] = v;
  return j;
}

/// Opens `path` for writing, or returns std::cout when path is empty or "-".
class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

/// Shortest text that round-trips a double.
inline std::string fmt(double v) {
  char buf[32];
  for (int p = 6; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace rrg
