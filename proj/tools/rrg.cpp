// Command-line front end: words, simulate, limit, cov, spectra, validate.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rrg/acceptance.hpp"
#include "rrg/rrg.hpp"

using namespace rrg;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ExperimentConfig::from_text(ss.str());
}

/// Fills an option from the config file unless it was given on the command line.
template <typename T>
void fill(CLI::App* sub, const char* flag, T& target, const T& from_config, bool have_config) {
  if (have_config && sub->get_option(flag)->count() == 0) target = from_config;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
  ExperimentConfig c;
  c.set_grid(g);
  return {c.nt, c.ns};
}

std::vector<std::array<double, 4>> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file " + path);
  std::vector<std::array<double, 4>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::array<double, 4> p{};
    std::stringstream ss(line);
    std::string cell;
    for (double& v : p) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("points rows need four columns: " + line);
      v = std::stod(cell);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrg: permutation-model random regular graphs evolving in dimension and time"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--config", g.config, "canonical text config (key = value lines)");

  // words
  auto* words = app.add_subcommand("words", "word classes up to length k with their statistics");
  int wd = 2, wk = 3;
  words->add_option("--d", wd)->required();
  words->add_option("--k", wk)->required();
  words->add_option("--out", g.out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "finite-graph field: class counts on a (t, s) grid");
  int sd = 2, skmax = 3;
  double sT = 8, sT0 = 1, sS0 = 1;
  std::string sgrid = "3x3";
  std::uint64_t sR = 10;
  sim->add_option("--d", sd);
  sim->add_option("--T", sT);
  sim->add_option("--T0", sT0);
  sim->add_option("--S0", sS0);
  sim->add_option("--grid", sgrid);
  sim->add_option("--replicas", sR);
  sim->add_option("--kmax", skmax);
  sim->add_option("--seed", g.seed);
  sim->add_option("--out", g.out);

  // limit
  auto* lim = app.add_subcommand("limit", "limit field: class counts on a (t, s) grid");
  int ld = 2, lK = 3, lL = 0;
  double lT0 = 1, lS0 = 1;
  std::string lgrid = "3x3", method = "exact";
  std::uint64_t lR = 10;
  lim->add_option("--d", ld);
  lim->add_option("--K", lK);
  lim->add_option("--L", lL, "truncation level for --method truncated (default K + 8)");
  lim->add_option("--T0", lT0);
  lim->add_option("--S0", lS0);
  lim->add_option("--grid", lgrid);
  lim->add_option("--replicas", lR);
  lim->add_option("--method", method)->check(CLI::IsMember({"exact", "truncated"}));
  lim->add_option("--seed", g.seed);
  lim->add_option("--out", g.out);

  // cov
  auto* cov = app.add_subcommand("cov", "closed-form covariances at point pairs");
  std::string mode = "finite", points;
  int cd = 2, cj = 1, ck = 0;
  cov->add_option("--mode", mode)->check(CLI::IsMember({"finite", "U", "G"}));
  cov->add_option("--d", cd);
  cov->add_option("--j", cj)->required();
  cov->add_option("--k", ck, "second length (finite mode, default j)");
  cov->add_option("--points", points, "CSV with header and rows t1,s1,t2,s2 (u1,v1,u2,v2 for G)")->required();
  cov->add_option("--out", g.out);

  // spectra
  auto* spec = app.add_subcommand("spectra", "trace identity and cycle counts on one random graph");
  int pd = 2, pkmax = 10;
  std::uint64_t pn = 200;
  spec->add_option("--d", pd);
  spec->add_option("--n", pn);
  spec->add_option("--kmax", pkmax);
  spec->add_option("--seed", g.seed);
  spec->add_option("--out", g.out);

  // validate
  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  std::string suite = "all";
  val->add_option("--suite", suite)->check(CLI::IsMember({"exact", "statistical", "all"}));
  val->add_option("--seed", g.seed);
  val->add_option("--out", g.out, "JSON summary");

  CLI11_PARSE(app, argc, argv);

  try {
    const bool have = !g.config.empty();
    const ExperimentConfig cfg = load_config(g.config);
    if (have && app.get_option("--seed")->count() == 0) g.seed = cfg.seed;

    if (*words) {
      OutputFile out(g.out);
      auto& os = out.stream();
      os << "word,length,h,b,c,orbit_size\n";
      for (int k = 1; k <= wk; ++k) {
        for (const Word& w : enumerate_classes(wd, k)) {
          const auto st = word_stats(w);
          os << w.text() << "," << st.length << "," << st.h << "," << st.b << "," << st.c << "," << orbit_size(w)
             << "\n";
        }
      }
    } else if (*sim) {
      fill(sim, "--d", sd, cfg.d, have);
      fill(sim, "--T", sT, cfg.T, have);
      fill(sim, "--T0", sT0, cfg.T0, have);
      fill(sim, "--S0", sS0, cfg.S0, have);
      fill(sim, "--kmax", skmax, cfg.K, have);
      fill(sim, "--replicas", sR, cfg.replicas, have);
      if (have && sim->get_option("--grid")->count() == 0) sgrid = std::to_string(cfg.nt) + "x" + std::to_string(cfg.ns);
      const auto [nt, ns] = parse_grid(sgrid);
      const WordClassTable table(sd, skmax);
      const Rng root(g.seed, 0x5100);
      const auto rows = parallel_map<std::string>(sR, [&](std::size_t r) {
        Rng rng = root.split(r);
        const FieldGrid fg = field_grid(sd, sT, sT0, sS0, GridSpec{nt, ns}, rng);
        std::string text;
        for (std::size_t i = 0; i < fg.t.size(); ++i) {
          for (std::size_t j = 0; j < fg.s.size(); ++j) {
            std::vector<std::int64_t> c(table.size(), 0);
            if (fg.cells[i][j].front().size() > 0) c = class_counts(MultiGraph(fg.cells[i][j]), table);
            for (std::uint32_t w = 0; w < table.size(); ++w) {
              text += std::to_string(r) + "," + fmt(fg.t[i]) + "," + fmt(fg.s[j]) + "," +
                      std::to_string(table.stats(w).length) + "," + table.word(w).text() + "," + std::to_string(c[w]) +
                      "\n";
            }
          }
        }
        return text;
      });
      OutputFile out(g.out);
      out.stream() << "replica,t,s,k,word,count\n";
      for (const auto& t : rows) out.stream() << t;
    } else if (*lim) {
      fill(lim, "--d", ld, cfg.d, have);
      fill(lim, "--K", lK, cfg.K, have);
      fill(lim, "--L", lL, cfg.L, have);
      fill(lim, "--T0", lT0, cfg.T0, have);
      fill(lim, "--S0", lS0, cfg.S0, have);
      fill(lim, "--replicas", lR, cfg.replicas, have);
      if (have && lim->get_option("--grid")->count() == 0) lgrid = std::to_string(cfg.nt) + "x" + std::to_string(cfg.ns);
      const auto [nt, ns] = parse_grid(lgrid);
      const int L = lL > 0 ? lL : lK + 8;
      if (L < lK) throw ConfigError("L must be >= K");
      const WordClassTable table(ld, method == "exact" ? lK : L);
      const GridSpec grid{nt, ns};
      const auto t = grid.t_values(lT0), s = grid.s_values(lS0);
      const Rng root(g.seed, 0x11A0);
      const auto rows = parallel_map<std::string>(lR, [&](std::size_t r) {
        Rng rng = root.split(r);
        const auto smp = method == "exact" ? sample_limit_field_exact(table, lK, lT0, lS0, t, s, rng)
                                           : sample_limit_field(table, lK, lT0, lS0, t, s, rng);
        std::string text;
        for (std::size_t i = 0; i < t.size(); ++i) {
          for (std::size_t j = 0; j < s.size(); ++j) {
            for (std::uint32_t w = 0; w < smp.classes; ++w) {
              text += std::to_string(r) + "," + fmt(t[i]) + "," + fmt(s[j]) + "," + table.word(w).text() + "," +
                      std::to_string(smp.at(i, j, w)) + "\n";
            }
          }
        }
        return text;
      });
      OutputFile out(g.out);
      out.stream() << "replica,t,s,word,count\n";
      for (const auto& text : rows) out.stream() << text;
    } else if (*cov) {
      const auto pts = read_points(points);
      OutputFile out(g.out);
      auto& os = out.stream();
      if (mode == "G") {
        os << "u1,v1,u2,v2,cov\n";
      } else if (mode == "U") {
        os << "t1,s1,t2,s2,cov\n";
      } else {
        os << "t1,s1,t2,s2,cov_lo,cov_hi\n";
      }
      for (const auto& p : pts) {
        os << fmt(p[0]) << "," << fmt(p[1]) << "," << fmt(p[2]) << "," << fmt(p[3]) << ",";
        if (mode == "G") {
          os << fmt(cov_G(cj, p[0], p[1], p[2], p[3])) << "\n";
        } else if (mode == "U") {
          os << fmt(cov_U(cj, p[0], p[1], p[2], p[3])) << "\n";
        } else {
          const auto c = cov_finite_d(cd, cj, ck > 0 ? ck : cj, p[0], p[1], p[2], p[3]);
          os << fmt(c.lo) << "," << (std::isinf(c.hi) ? std::string("inf") : fmt(c.hi)) << "\n";
        }
      }
    } else if (*spec) {
      Rng rng(g.seed, 0x5BEC);
      const MultiGraph graph(uniform_permutations(pd, pn, rng));
      const SpectralReport rep = spectral_report(graph, pkmax, true);
      OutputFile out(g.out);
      auto& os = out.stream();
      os << "k,trace_gamma,cnbw,residual,f_trace,cycle_count,tangle_free\n";
      for (const auto& r : rep.rows) {
        os << r.k << "," << fmt(r.trace_gamma) << "," << r.cnbw << "," << fmt(r.residual) << "," << fmt(r.f_trace)
           << "," << r.cycle_count << "," << (rep.tangle_free ? 1 : 0) << "\n";
      }
    } else if (*val) {
      bool pass = false;
      const bool seeded = val->get_option("--seed")->count() || app.get_option("--seed")->count() || have;
      const auto summary = run_acceptance(suite, std::cerr, pass, seeded ? g.seed : 20240601);
      OutputFile out(g.out);
      out.stream() << summary.dump(2) << "\n";
      return pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
