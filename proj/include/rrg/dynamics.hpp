#pragma once

// Random transposition dynamics in time and the coupled backward projection
// in dimension.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rrg/rng.hpp"
#include "rrg/tower.hpp"

namespace rrg {

struct Transposition {
  double time = 0.0;
  Label i = 0;
  Label j = 0;
};

struct TranspositionLog {
  std::size_t n = 0;
  std::vector<Transposition> events;
};

/// Events at aggregate rate n; the ringing label I is uniform and J is uniform on
/// the other labels, so each unordered pair rings at rate 2/(n-1).
inline TranspositionLog evolve(std::size_t n, double S0, Rng& rng) {
  if (S0 < 0) throw std::invalid_argument("evolve: S0 < 0");
  TranspositionLog log;
  log.n = n;
  if (n < 2) return log;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(static_cast<double>(n));
    if (t > S0) break;
    const auto i = static_cast<Label>(rng.below(n));
    auto j = static_cast<Label>(rng.below(n - 1));
    if (j >= i) ++j;
    log.events.push_back({t, i, j});
  }
  return log;
}

/// sigma_s = tau_k ... tau_1 over events with time <= s.
inline Permutation sigma_at(const TranspositionLog& log, double s) {
  Permutation sigma(log.n);
  for (const auto& e : log.events) {
    if (e.time > s) break;
    sigma.left_transpose(e.i, e.j);
  }
  return sigma;
}

/// sigma_s maintained incrementally along increasing s.
class SigmaCursor {
 public:
  explicit SigmaCursor(const TranspositionLog& log) : log_(&log), sigma_(log.n) {}

  const Permutation& advance_to(double s) {
    if (s < last_) throw std::invalid_argument("SigmaCursor: s must be nondecreasing");
    last_ = s;
    while (next_ < log_->events.size() && log_->events[next_].time <= s) {
      const auto& e = log_->events[next_++];
      sigma_.left_transpose(e.i, e.j);
    }
    return sigma_;
  }
  const Permutation& sigma() const { return sigma_; }

 private:
  const TranspositionLog* log_;
  Permutation sigma_;
  std::size_t next_ = 0;
  double last_ = 0.0;
};

struct FieldState {
  int d = 0;
  double T = 0.0;
  std::vector<PermutationTower> towers;
  TranspositionLog log;

  std::size_t n() const { return towers.empty() ? 0 : towers.front().size(); }
};

/// d towers of size n from independent child streams, plus a transposition log on [0, S0].
inline FieldState make_field_state(int d, std::size_t n, double T, double S0, Rng& rng) {
  FieldState st;
  st.d = d;
  st.T = T;
  for (int i = 0; i < d; ++i) {
    Rng child = rng.split(static_cast<std::uint64_t>(i));
    st.towers.push_back(grow_tower({}, n, child));
  }
  Rng evo = rng.split(0xE7E7u);
  st.log = evolve(n, S0, evo);
  return st;
}

/// Removes `removed` labels from p (bypassing each), then relabels the kept labels
/// order-preservingly. Same result as successive crp_delete calls in any order.
inline Permutation induced_permutation(const Permutation& p, const std::vector<char>& removed) {
  const std::size_t n = p.size();
  std::vector<Label> rank(n, 0);
  Label next = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!removed[x]) rank[x] = next++;
  }
  std::vector<Label> m(next);
  for (std::size_t x = 0; x < n; ++x) {
    if (removed[x]) continue;
    Label y = p(static_cast<Label>(x));
    while (removed[y]) y = p(y);
    m[rank[x]] = rank[y];
  }
  return Permutation::from_map(std::move(m));
}

/// The time-s permutations sigma_s * pi_i with labels sigma_s(n), ..., sigma_s(m+1) removed.
inline std::vector<Permutation> project(const std::vector<Permutation>& top, const Permutation& sigma,
                                        std::size_t m) {
  const std::size_t n = sigma.size();
  if (m > n) throw std::out_of_range("project: m > n");
  std::vector<char> removed(n, 0);
  for (std::size_t k = m; k < n; ++k) removed[sigma(static_cast<Label>(k))] = 1;
  std::vector<Permutation> out;
  out.reserve(top.size());
  for (const auto& pi : top) {
    std::vector<Label> img(n);
    for (std::size_t x = 0; x < n; ++x) img[x] = sigma(pi(static_cast<Label>(x)));
    const Permutation time_s = Permutation::from_map(std::move(img));
    out.push_back(m == n ? time_s : induced_permutation(time_s, removed));
  }
  return out;
}

inline std::vector<Permutation> project(const FieldState& st, double s, std::size_t m) {
  std::vector<Permutation> top;
  for (const auto& t : st.towers) top.push_back(t.top());
  return project(top, sigma_at(st.log, s), m);
}

struct GridSpec {
  std::size_t nt = 1;
  std::size_t ns = 1;

  /// nt offsets evenly spaced on [-T0, 0].
  std::vector<double> t_values(double T0) const {
    std::vector<double> out(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      out[i] = nt == 1 ? 0.0 : -T0 + T0 * static_cast<double>(i) / static_cast<double>(nt - 1);
    }
    return out;
  }
  /// ns times evenly spaced on [0, S0].
  std::vector<double> s_values(double S0) const {
    std::vector<double> out(ns);
    for (std::size_t j = 0; j < ns; ++j) {
      out[j] = ns == 1 ? 0.0 : S0 * static_cast<double>(j) / static_cast<double>(ns - 1);
    }
    return out;
  }
};

/// One coupled replica of the field: the permutations of G(T + t, s) for every
/// (t, s) on the grid. cells[i][j] holds the d permutations at (t_i, s_j).
struct FieldGrid {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<std::size_t> sizes;  // M_{T + t_i}
  std::vector<std::vector<std::vector<Permutation>>> cells;
};

inline FieldGrid field_grid(int d, double T, double T0, double S0, const GridSpec& grid, Rng& rng,
                            const std::vector<double>& t_override = {},
                            const std::vector<double>& s_override = {}) {
  if (T < T0 || T0 < 0 || S0 < 0) throw std::invalid_argument("field_grid: need T >= T0 >= 0, S0 >= 0");
  FieldGrid out;
  out.t = t_override.empty() ? grid.t_values(T0) : t_override;
  out.s = s_override.empty() ? grid.s_values(S0) : s_override;
  Rng clock_rng = rng.split(1);
  const DimensionClock clock = sample_dimension(T, clock_rng);
  const std::size_t n = clock.M();
  Rng state_rng = rng.split(2);
  const FieldState st = make_field_state(d, n, T, S0, state_rng);
  std::vector<Permutation> top;
  for (const auto& tw : st.towers) top.push_back(tw.top());
  for (double ti : out.t) out.sizes.push_back(clock.M_at(T + ti));

  std::vector<std::size_t> order(out.s.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.s[a] < out.s[b]; });

  out.cells.assign(out.t.size(), std::vector<std::vector<Permutation>>(out.s.size()));
  SigmaCursor cursor(st.log);
  for (std::size_t j : order) {
    const Permutation& sigma = cursor.advance_to(out.s[j]);
    for (std::size_t i = 0; i < out.t.size(); ++i) out.cells[i][j] = project(top, sigma, out.sizes[i]);
  }
  return out;
}

}  // namespace rrg
