#pragma once

// Monte Carlo and exact experiments behind the acceptance suite. Each returns
// StatReports; replicas run through parallel_map with one child stream each.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rrg/config.hpp"
#include "rrg/cycles.hpp"
#include "rrg/dynamics.hpp"
#include "rrg/limitfield.hpp"
#include "rrg/parallel.hpp"
#include "rrg/spectra.hpp"
#include "rrg/stats.hpp"
#include "rrg/tower.hpp"
#include "rrg/words.hpp"

namespace rrg {

struct ExperimentResult {
  std::vector<StatReport> reports;
  std::vector<std::string> info;
  double seconds = 0.0;
  bool pass() const { return suite_passes(reports); }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// d independent uniform permutations of size n, grown by the CRP.
inline std::vector<Permutation> uniform_permutations(int d, std::size_t n, Rng& rng) {
  std::vector<Permutation> out;
  for (int i = 0; i < d; ++i) {
    Rng child = rng.split(static_cast<std::uint64_t>(i));
    out.push_back(grow_tower({}, n, child).top());
  }
  return out;
}

/// Class id of a cycle, or nullopt when it is longer than the table.
inline std::optional<std::uint32_t> cycle_class(const MultiGraph& g, const WordClassTable& table,
                                                const std::vector<Dart>& darts) {
  if (static_cast<int>(darts.size()) > table.max_len()) return std::nullopt;
  return table.find(dart_codes(g, darts));
}

/// Per-class counts of all cycles of length <= table length.
inline std::vector<std::int64_t> class_counts(const MultiGraph& g, const WordClassTable& table) {
  std::vector<std::int64_t> c(table.size(), 0);
  for_each_cycle(g, static_cast<std::size_t>(table.max_len()), [&](const std::vector<Dart>& darts) {
    if (auto id = cycle_class(g, table, darts)) ++c[*id];
  });
  return c;
}

inline std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Word algebra

/// sum over classes of 2k/h equals a(d, k); orbit sizes equal 2k/h by explicit generation.
inline ExperimentResult run_word_algebra(int dmax, int kmax) {
  Stopwatch sw;
  ExperimentResult res;
  for (int d = 1; d <= dmax; ++d) {
    for (int k = 1; k <= kmax; ++k) {
      std::uint64_t total = 0;
      std::uint64_t orbit_mismatch = 0;
      for (const Word& w : enumerate_classes(d, k)) {
        const int h = word_stats(w).h;
        total += static_cast<std::uint64_t>(2 * k / h);
        if (orbit(w).size() != static_cast<std::size_t>(2 * k / h)) ++orbit_mismatch;
      }
      const auto a = static_cast<double>(a_count(d, k));
      res.reports.push_back(make_bound_report("class_sum d=" + std::to_string(d) + " k=" + std::to_string(k),
                                              static_cast<double>(total), 0.0, a, a, a));
      res.reports.push_back(make_bound_report("orbit_mismatches d=" + std::to_string(d) + " k=" + std::to_string(k),
                                              static_cast<double>(orbit_mismatch), 0.0, 0.0, 0.0, 0.0));
    }
  }
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Spectra

struct GraphShape {
  int d;
  std::size_t n;
};

/// Max over k <= kmax of the trace-identity residual, one report per graph; plus
/// the f_k / C_k equality on tangle-free instances.
inline ExperimentResult run_spectra_identity(const std::vector<GraphShape>& shapes, int kmax, std::uint64_t seed,
                                             double bound = 1e-6) {
  Stopwatch sw;
  ExperimentResult res;
  const Rng root(seed, 0x5BEC);
  struct Out {
    double residual = 0.0;
    bool tangle_free = false;
    double f_err = 0.0;
  };
  const auto outs = parallel_map<Out>(shapes.size(), [&](std::size_t r) {
    Rng rng = root.split(r);
    const MultiGraph g(uniform_permutations(shapes[r].d, shapes[r].n, rng));
    const int kc = std::min(kmax, 3);
    const SpectralReport rep = spectral_report(g, kmax, false);
    Out o;
    o.residual = rep.max_residual();
    o.tangle_free = is_tangle_free(g, static_cast<std::size_t>(kc), static_cast<std::size_t>(kc));
    if (o.tangle_free) {
      const auto cc = cycle_counts(g, static_cast<std::size_t>(kc));
      for (int k = 1; k <= kc; ++k) {
        o.f_err = std::max(o.f_err, std::abs(rep.rows[k - 1].f_trace - static_cast<double>(cc[k])));
      }
    }
    return o;
  });
  std::size_t tf = 0;
  for (std::size_t r = 0; r < shapes.size(); ++r) {
    const std::string tag = "graph " + std::to_string(r) + " d=" + std::to_string(shapes[r].d) +
                            " n=" + std::to_string(shapes[r].n);
    res.reports.push_back(make_bound_report(tag + " max residual", outs[r].residual, 0.0, 0.0, 0.0, bound));
    if (outs[r].tangle_free) {
      ++tf;
      res.info.push_back(tag + ": tangle-free, max |f_trace - C_k| over k <= 3 = " + fixed(outs[r].f_err, 9));
    }
  }
  res.info.push_back(std::to_string(tf) + " of " + std::to_string(shapes.size()) + " graphs are (3,3) tangle-free");
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Poisson marginals of cycle counts

inline ExperimentResult run_poisson_check(const ExperimentConfig& cfg, double tv_bound = 0.03) {
  cfg.validate();
  if (cfg.n < 100 * static_cast<std::uint64_t>(cfg.K)) throw ConfigError("poisson check needs n >= 100 K");
  Stopwatch sw;
  const Rng root(cfg.seed, 0x9015);
  const auto K = static_cast<std::size_t>(cfg.K);
  const auto counts = parallel_map<std::vector<std::uint64_t>>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    const MultiGraph g(uniform_permutations(cfg.d, cfg.n, rng));
    return cycle_counts(g, K);
  });
  ExperimentResult res;
  for (std::size_t k = 1; k <= K; ++k) {
    std::vector<double> x;
    std::vector<std::uint64_t> c;
    for (const auto& v : counts) {
      x.push_back(static_cast<double>(v[k]));
      c.push_back(v[k]);
    }
    const double mean = static_cast<double>(a_count(cfg.d, static_cast<int>(k))) / (2.0 * static_cast<double>(k));
    const Estimate e = batch_mean(x);
    res.reports.push_back(make_report("mean C_" + std::to_string(k), e.value, e.se, mean, cfg.tolerance));
    const double tv = poisson_tv(c, mean);
    res.reports.push_back(make_bound_report("TV C_" + std::to_string(k), tv, 0.0, 0.0, 0.0, tv_bound));
  }
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Birth and death rates under random transpositions

/// Runs the transposition chain for cfg.T time units on one graph of size n per
/// replica, tracking class counts exactly through cycles meeting {I, J}.
inline ExperimentResult run_bd_rate_check(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n < 1000) throw ConfigError("bd rate check needs n >= 1000");
  Stopwatch sw;
  const WordClassTable table(cfg.d, cfg.K);
  const auto K = static_cast<std::size_t>(cfg.K);
  struct Tally {
    std::vector<double> exposure;
    std::vector<std::uint64_t> births, deaths;
  };
  const Rng root(cfg.seed, 0xBD01);
  const auto tallies = parallel_map<Tally>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    Rng perm_rng = rng.split(1);
    MultiGraph g(uniform_permutations(cfg.d, cfg.n, perm_rng));
    Rng evo = rng.split(2);
    Tally t{std::vector<double>(table.size(), 0.0), std::vector<std::uint64_t>(table.size(), 0),
            std::vector<std::uint64_t>(table.size(), 0)};
    std::vector<std::int64_t> count = class_counts(g, table);
    std::vector<std::int64_t> delta(table.size(), 0);
    std::vector<std::uint32_t> touched;
    auto local = [&](Label i, Label j, int sign) {
      for_each_cycle_meeting(g, K, {i, j}, [&](const std::vector<Dart>& darts) {
        if (auto id = cycle_class(g, table, darts)) {
          if (delta[*id] == 0) touched.push_back(*id);
          delta[*id] += sign;
        }
      });
    };
    const auto n = static_cast<double>(cfg.n);
    double time = 0.0;
    for (;;) {
      const double dt = evo.exponential(n);
      const double step = std::min(dt, cfg.T - time);
      for (std::size_t w = 0; w < table.size(); ++w) t.exposure[w] += static_cast<double>(count[w]) * step;
      time += dt;
      if (time > cfg.T) break;
      const auto i = static_cast<Label>(evo.below(cfg.n));
      auto j = static_cast<Label>(evo.below(cfg.n - 1));
      if (j >= i) ++j;
      local(i, j, -1);
      g.left_transpose(i, j);
      local(i, j, +1);
      for (std::uint32_t w : touched) {
        if (delta[w] > 0) t.births[w] += static_cast<std::uint64_t>(delta[w]);
        if (delta[w] < 0) t.deaths[w] += static_cast<std::uint64_t>(-delta[w]);
        count[w] += delta[w];
        delta[w] = 0;
      }
      touched.clear();
    }
    return t;
  });
  std::vector<double> exposure(table.size(), 0.0);
  std::vector<std::uint64_t> births(table.size(), 0), deaths(table.size(), 0);
  for (const auto& t : tallies) {
    for (std::size_t w = 0; w < table.size(); ++w) {
      exposure[w] += t.exposure[w];
      births[w] += t.births[w];
      deaths[w] += t.deaths[w];
    }
  }
  ExperimentResult res;
  const double total_time = cfg.T * static_cast<double>(cfg.replicas);
  const auto p1p1 = *table.find(Word::parse("p1.p1"));
  const std::optional<std::uint32_t> p1P2 =
      cfg.d >= 2 ? table.find(Word::parse("p1.P2")) : std::optional<std::uint32_t>{};
  for (std::uint32_t w = 0; w < table.size(); ++w) {
    const auto& st = table.stats(w);
    const double hazard = exposure[w] > 0 ? static_cast<double>(deaths[w]) / exposure[w] : 0.0;
    const double hazard_se = exposure[w] > 0 ? std::sqrt(static_cast<double>(deaths[w])) / exposure[w] : 0.0;
    const double brate = static_cast<double>(births[w]) / total_time;
    const double brate_se = std::sqrt(static_cast<double>(births[w])) / total_time;
    const double ref_h = 2.0 * st.b, ref_b = 2.0 * st.b / st.h;
    const std::string word = table.word(w).text();
    if (w == p1p1) {
      res.reports.push_back(make_bound_report("death hazard " + word, hazard, hazard_se, ref_h, 0.95 * ref_h, 1.05 * ref_h));
      res.reports.push_back(make_bound_report("birth rate " + word, brate, brate_se, ref_b, 0.95 * ref_b, 1.05 * ref_b));
    } else if (p1P2 && w == *p1P2) {
      res.reports.push_back(make_bound_report("death hazard " + word, hazard, hazard_se, 0.0, 0.0,
                                              5.0 / static_cast<double>(cfg.n)));
    }
    res.info.push_back(word + ": hazard " + fixed(hazard) + " (2b = " + fixed(ref_h) + "), birth rate " +
                       fixed(brate) + " (2b/h = " + fixed(ref_b) + "), deaths " + std::to_string(deaths[w]) +
                       ", exposure " + fixed(exposure[w], 1));
  }
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Halving-chain oracle on finite graphs

/// Uniform permutations at n = M_T, then labels removed from the top at the
/// clock's jump times down to M_{T-1}. Every transition of a tracked cycle is
/// classified exactly: removing v halves a cycle through v when its in-letter and
/// out-letter at v agree, and kills it otherwise.
inline ExperimentResult run_halving_oracle(const ExperimentConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  const WordClassTable table(cfg.d, cfg.K);
  const auto K = static_cast<std::size_t>(cfg.K);
  const std::uint32_t death = static_cast<std::uint32_t>(table.size());
  struct Tally {
    std::vector<double> exposure;
    std::vector<std::vector<std::uint64_t>> jumps;  // [from][to or death]
  };
  const Rng root(cfg.seed, 0x4A1F);
  const auto tallies = parallel_map<Tally>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    Rng clock_rng = rng.split(1);
    const DimensionClock clock = sample_dimension(cfg.T, clock_rng);
    const std::size_t n = clock.M();
    const std::size_t m_low = clock.M_at(cfg.T - 1.0);
    Tally t{std::vector<double>(table.size(), 0.0),
            std::vector<std::vector<std::uint64_t>>(table.size(), std::vector<std::uint64_t>(table.size() + 1, 0))};
    if (n == 0) return t;
    Rng perm_rng = rng.split(2);
    MultiGraph g(uniform_permutations(cfg.d, n, perm_rng));
    std::vector<std::int64_t> count = class_counts(g, table);
    double cur = cfg.T;
    for (std::size_t m = n; m > m_low; --m) {
      const double jt = clock.jump_times[m - 1];
      for (std::size_t w = 0; w < table.size(); ++w) t.exposure[w] += static_cast<double>(count[w]) * (cur - jt);
      cur = jt;
      const auto v = static_cast<Label>(m - 1);
      std::vector<Label> preds;
      for (int i = 0; i < g.d(); ++i) {
        const Label p = g.perm(i).inverse(v);
        if (p != v) preds.push_back(p);
      }
      std::vector<Label> before_set{v};
      before_set.insert(before_set.end(), preds.begin(), preds.end());
      for_each_cycle_meeting(g, K, before_set, [&](const std::vector<Dart>& darts) {
        const auto id = cycle_class(g, table, darts);
        if (!id) return;
        --count[*id];
        if (g.tail(darts.front()) != v) return;
        // Started at v: darts.front() leaves v, darts.back() enters it.
        const LetterCode out = g.code(darts.front()), in = g.code(darts.back());
        std::uint32_t target = death;
        if (darts.size() > 1 && out == in) {
          std::vector<LetterCode> rest = dart_codes(g, darts);
          rest.erase(rest.begin());
          target = *table.find(rest);
        }
        ++t.jumps[*id][target];
      });
      g.pop_top();
      for_each_cycle_meeting(g, K, preds, [&](const std::vector<Dart>& darts) {
        if (auto id = cycle_class(g, table, darts)) ++count[*id];
      });
    }
    const double low = cfg.T - 1.0;
    for (std::size_t w = 0; w < table.size(); ++w) t.exposure[w] += static_cast<double>(count[w]) * (cur - low);
    return t;
  });
  std::vector<double> exposure(table.size(), 0.0);
  std::vector<std::vector<std::uint64_t>> jumps(table.size(), std::vector<std::uint64_t>(table.size() + 1, 0));
  for (const auto& t : tallies) {
    for (std::size_t w = 0; w < table.size(); ++w) {
      exposure[w] += t.exposure[w];
      for (std::size_t u = 0; u <= table.size(); ++u) jumps[w][u] += t.jumps[w][u];
    }
  }
  ExperimentResult res;
  for (std::uint32_t w = 0; w < table.size(); ++w) {
    std::vector<double> ref(table.size() + 1, 0.0);
    for (const auto& tr : table.halving(w)) ref[tr.target] = tr.multiplicity;
    ref[death] = table.death_rate(w);
    for (std::uint32_t u = 0; u <= table.size(); ++u) {
      if (ref[u] == 0.0 && jumps[w][u] == 0) continue;
      const double E = exposure[w];
      const double est = E > 0 ? static_cast<double>(jumps[w][u]) / E : 0.0;
      const double se = E > 0 ? std::sqrt(ref[u] * E) / E : 0.0;
      const std::string to = u == death ? std::string("death") : table.word(u).text();
      res.reports.push_back(make_report("rate " + table.word(w).text() + " -> " + to, est, se, ref[u], cfg.tolerance));
    }
  }
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Covariances

struct GridPoint {
  double t;
  double s;
};

struct PointPair {
  GridPoint a;
  GridPoint b;
};

inline std::string point_text(const GridPoint& p) { return "(" + fmt_short(p.t) + "," + fmt_short(p.s) + ")"; }

inline std::string pair_text(const PointPair& p) { return point_text(p.a) + "-" + point_text(p.b); }

/// N_j at every (t, s) grid cell, per replica: values[j][cell][replica].
struct CountGrid {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<std::vector<std::vector<double>>> values;

  std::size_t cell(const GridPoint& p) const {
    const auto it = std::find(t.begin(), t.end(), p.t);
    const auto js = std::find(s.begin(), s.end(), p.s);
    if (it == t.end() || js == s.end()) throw std::invalid_argument("point not on grid");
    return static_cast<std::size_t>(it - t.begin()) * s.size() + static_cast<std::size_t>(js - s.begin());
  }
};

inline CountGrid grid_for(const std::vector<PointPair>& pairs, int K, std::size_t replicas) {
  CountGrid g;
  for (const auto& p : pairs) {
    for (const GridPoint& q : {p.a, p.b}) {
      if (std::find(g.t.begin(), g.t.end(), q.t) == g.t.end()) g.t.push_back(q.t);
      if (std::find(g.s.begin(), g.s.end(), q.s) == g.s.end()) g.s.push_back(q.s);
    }
  }
  std::sort(g.t.begin(), g.t.end());
  std::sort(g.s.begin(), g.s.end());
  g.values.assign(static_cast<std::size_t>(K) + 1,
                  std::vector<std::vector<double>>(g.t.size() * g.s.size(), std::vector<double>(replicas, 0.0)));
  return g;
}

/// Finite-graph field G(T + t, s): cycle counts by length on every grid cell.
inline CountGrid finite_count_grid(const ExperimentConfig& cfg, const std::vector<PointPair>& pairs) {
  CountGrid grid = grid_for(pairs, cfg.K, cfg.replicas);
  const Rng root(cfg.seed, 0xF1E1);
  const std::size_t cells = grid.t.size() * grid.s.size();
  const auto K = static_cast<std::size_t>(cfg.K);
  const auto per = parallel_map<std::vector<std::uint64_t>>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    const FieldGrid fg = field_grid(cfg.d, cfg.T, cfg.T0, cfg.S0, GridSpec{}, rng, grid.t, grid.s);
    std::vector<std::uint64_t> out(cells * (K + 1), 0);
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
      for (std::size_t j = 0; j < grid.s.size(); ++j) {
        const auto& perms = fg.cells[i][j];
        if (perms.front().size() == 0) continue;
        const auto cc = cycle_counts(MultiGraph(perms), K);
        for (std::size_t k = 1; k <= K; ++k) out[(i * grid.s.size() + j) * (K + 1) + k] = cc[k];
      }
    }
    return out;
  });
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    for (std::size_t c = 0; c < cells; ++c) {
      for (std::size_t k = 1; k <= K; ++k) grid.values[k][c][r] = static_cast<double>(per[r][c * (K + 1) + k]);
    }
  }
  return grid;
}

/// Limit field by the exact dual sampler: N_k on every grid cell.
inline CountGrid limit_count_grid(const ExperimentConfig& cfg, const std::vector<PointPair>& pairs) {
  CountGrid grid = grid_for(pairs, cfg.K, cfg.replicas);
  const WordClassTable table(cfg.d, cfg.K);
  const Rng root(cfg.seed, 0x11F1);
  const std::size_t cells = grid.t.size() * grid.s.size();
  const auto K = static_cast<std::size_t>(cfg.K);
  const auto per = parallel_map<std::vector<std::uint64_t>>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    const auto sample = sample_limit_field_exact(table, cfg.K, cfg.T0, cfg.S0, grid.t, grid.s, rng);
    std::vector<std::uint64_t> out(cells * (K + 1), 0);
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
      for (std::size_t j = 0; j < grid.s.size(); ++j) {
        for (std::size_t k = 1; k <= K; ++k) {
          out[(i * grid.s.size() + j) * (K + 1) + k] = sample.length_count(table, i, j, static_cast<int>(k));
        }
      }
    }
    return out;
  });
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    for (std::size_t c = 0; c < cells; ++c) {
      for (std::size_t k = 1; k <= K; ++k) grid.values[k][c][r] = static_cast<double>(per[r][c * (K + 1) + k]);
    }
  }
  return grid;
}

/// Covariances of N_j across the point pairs against cov_finite_d, and cross-length
/// covariances at equal t against 0.
inline void covariance_reports(const CountGrid& grid, const ExperimentConfig& cfg, const std::vector<PointPair>& pairs,
                               const std::string& label, ExperimentResult& res) {
  for (const auto& p : pairs) {
    const std::size_t ca = grid.cell(p.a), cb = grid.cell(p.b);
    for (int j = 1; j <= cfg.K; ++j) {
      for (int k = 1; k <= cfg.K; ++k) {
        if (j != k && p.a.t != p.b.t) continue;
        if (j > k && ca == cb) continue;
        const Estimate e = batch_covariance(grid.values[j][ca], grid.values[k][cb]);
        const CovInterval ref = cov_finite_d(cfg.d, j, k, p.a.t, p.a.s, p.b.t, p.b.s);
        const std::string name = label + " cov N_" + std::to_string(j) + " N_" + std::to_string(k) + " " + pair_text(p);
        res.reports.push_back(make_report(name, e.value, e.se, ref.lo, cfg.tolerance));
      }
    }
  }
}

inline ExperimentResult run_cov_check(const ExperimentConfig& cfg, const std::vector<PointPair>& pairs,
                                      bool finite = true, bool limit = true) {
  cfg.validate();
  Stopwatch sw;
  ExperimentResult res;
  if (finite) {
    Stopwatch f;
    covariance_reports(finite_count_grid(cfg, pairs), cfg, pairs, "graph", res);
    res.info.push_back("finite-graph field: " + std::to_string(cfg.replicas) + " replicas in " + fixed(f.seconds(), 1) + " s");
  }
  if (limit) {
    Stopwatch l;
    covariance_reports(limit_count_grid(cfg, pairs), cfg, pairs, "limit", res);
    res.info.push_back("limit field: " + std::to_string(cfg.replicas) + " replicas in " + fixed(l.seconds(), 1) + " s");
  }
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Duality of the halving and doubling chains

/// q_doubling(a, b)/h(a) against q_halving(b, a)/h(b) at time u, for every pair of
/// classes with |a| <= |b| <= K whose exact transition probability is positive.
inline ExperimentResult run_duality_check(int d, int K, double u, std::size_t chains, std::uint64_t seed) {
  Stopwatch sw;
  const WordClassTable table(d, K);
  const std::size_t m = table.size();
  const Rng root(seed, 0xD0A1);
  auto histogram = [&](bool doubling, std::uint32_t start) {
    std::vector<double> h(m, 0.0);
    Rng rng = root.split(2 * static_cast<std::uint64_t>(start) + (doubling ? 1 : 0));
    for (std::size_t c = 0; c < chains; ++c) {
      const ChainTrajectory tr = doubling ? doubling_chain(table, start, u, rng) : halving_chain(table, start, u, rng);
      const ChainState& end = tr.final_state();
      if (end.id < m) h[end.id] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(chains);
    return h;
  };
  const auto fwd = parallel_map<std::vector<double>>(m, [&](std::size_t a) { return histogram(true, static_cast<std::uint32_t>(a)); });
  const auto bwd = parallel_map<std::vector<double>>(m, [&](std::size_t b) { return histogram(false, static_cast<std::uint32_t>(b)); });
  const Eigen::MatrixXd P = halving_semigroup(table, u);
  ExperimentResult res;
  const double N = static_cast<double>(chains);
  for (std::uint32_t a = 0; a < m; ++a) {
    for (std::uint32_t b = 0; b < m; ++b) {
      if (table.stats(a).length > table.stats(b).length || P(b, a) <= 0.0) continue;
      const double ha = table.stats(a).h, hb = table.stats(b).h;
      const double p1 = fwd[a][b], p2 = bwd[b][a];
      const double se = std::sqrt(p1 * (1 - p1) / N / (ha * ha) + p2 * (1 - p2) / N / (hb * hb));
      res.reports.push_back(make_report("duality " + table.word(a).text() + " | " + table.word(b).text(),
                                        p1 / ha - p2 / hb, se, 0.0, 3.0));
    }
  }
  res.info.push_back(std::to_string(chains) + " chains per start, u = " + fixed(u, 2));
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Analytic limits

inline ExperimentResult run_analytic_limits() {
  Stopwatch sw;
  ExperimentResult res;
  const double T0 = 30.0;
  const std::vector<double> us{-2, -1, 0, 1, 2}, vs{0, 0.5, 1, 2, 4};
  double sup = 0.0;
  for (int j = 1; j <= 3; ++j) {
    for (double u1 : us) {
      for (double v1 : vs) {
        for (double u2 : us) {
          for (double v2 : vs) {
            const double a = cov_U(j, -T0 + u1, v1 * std::exp(-T0) / 2, -T0 + u2, v2 * std::exp(-T0) / 2);
            sup = std::max(sup, std::abs(a - cov_G(j, u1, v1, u2, v2)));
          }
        }
      }
    }
  }
  res.reports.push_back(make_bound_report("sup |cov_U - cov_G| at T0=30", sup, 0.0, 0.0, 0.0, 1e-4));

  for (double v : {0.5, 1.0, 2.0}) {
    const double err = std::abs(yule_mgf(20.0, v * std::exp(-20.0) / 2) - 1.0 / (1.0 + v));
    res.reports.push_back(make_bound_report("|yule_mgf - 1/(1+v)| theta=20 v=" + fixed(v, 1), err, 0.0, 0.0, 0.0, 1e-6));
  }

  double tau_err = 0.0;
  for (int j = 1; j <= 10; ++j) {
    for (double s : {0.0, 0.1, 0.25}) {
      double brute = 0.0;
      for (std::uint32_t mask = 0; mask < (1u << j); ++mask) {
        int changes = 0;
        for (int i = 0; i < j; ++i) changes += ((mask >> i) & 1u) != ((mask >> ((i + 1) % j)) & 1u);
        brute += std::exp(2.0 * s * changes);
      }
      brute /= static_cast<double>(1u << j);
      tau_err = std::max(tau_err, std::abs(tau_mgf(j, s) - brute));
    }
  }
  res.reports.push_back(make_bound_report("max |tau_mgf - brute force| j<=10", tau_err, 0.0, 0.0, 0.0, 1e-12));

  double rel = 0.0;
  const int d = 1000;
  for (int j = 1; j <= 3; ++j) {
    for (auto [t1, s1, t2, s2] : std::vector<std::array<double, 4>>{{0, 0, 0, 0.3}, {-1, 0, 0, 0}, {-0.5, 0.2, 0, 1}}) {
      const double lim = 4.0 * j * j / std::pow(2.0 * d - 1.0, j) * cov_finite_d(d, j, j, t1, s1, t2, s2).lo;
      rel = std::max(rel, std::abs(lim / cov_U(j, t1, s1, t2, s2) - 1.0));
    }
  }
  res.reports.push_back(make_bound_report("max relative gap cov_U vs scaled finite d=1000", rel, 0.0, 0.0, 0.0, 0.01));
  res.seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Gaussianity at large d

/// One-point law of X_1, X_2 from the limit field at t = s = 0.
inline ExperimentResult run_gff_limit_check(const ExperimentConfig& cfg, double ks_bound = 0.05) {
  cfg.validate();
  Stopwatch sw;
  const WordClassTable table(cfg.d, 2);
  const Rng root(cfg.seed, 0x6FF0);
  const auto xs = parallel_map<std::array<double, 2>>(cfg.replicas, [&](std::size_t r) {
    Rng rng = root.split(r);
    const auto sample = sample_limit_field_exact(table, 2, 0.0, 0.0, {0.0}, {0.0}, rng);
    return std::array<double, 2>{scaled_X(sample, table, 1)[0], scaled_X(sample, table, 2)[0]};
  });
  std::vector<double> x1, x2;
  for (const auto& x : xs) {
    x1.push_back(x[0]);
    x2.push_back(x[1]);
  }
  ExperimentResult res;
  const int k = 2;
  const double var2 = 2.0 * k * static_cast<double>(a_count(cfg.d, k)) / std::pow(2.0 * cfg.d - 1.0, k);
  std::vector<double> std2;
  for (double v : x2) std2.push_back(v / std::sqrt(var2));
  const double ks = ks_distance(std2, normal_cdf);
  res.reports.push_back(make_bound_report("KS X_2 / sd vs N(0,1)", ks, 0.0, 0.0, 0.0, ks_bound));
  const double R = static_cast<double>(cfg.replicas);
  const double rho = sample_correlation(x1, x2);
  res.reports.push_back(make_report("corr(X_1, X_2)", rho, (1.0 - rho * rho) / std::sqrt(R - 1.0), 0.0, cfg.tolerance));
  const Estimate v = batch_mean([&] {
    std::vector<double> sq;
    const double m = mean_of(x2);
    for (double x : x2) sq.push_back((x - m) * (x - m));
    return sq;
  }());
  res.reports.push_back(make_report("Var X_2", v.value, v.se, var2, cfg.tolerance));
  res.info.push_back("KS of X_2 without standardizing: " + fixed(ks_distance(x2, normal_cdf)) +
                     " (Var X_2 = " + fixed(var2) + ", not 1)");
  res.seconds = sw.seconds();
  return res;
}

}  // namespace rrg
