#pragma once

// The limiting field: closed-form rates and covariances, halving and doubling
// chains, and two samplers for N_w(t, s).
//
// sample_limit_field is the defining construction truncated at length L: atoms
// of every class up to length L at dimension 0, each with a halving chain.
// sample_limit_field_exact has no truncation. It runs the dual doubling chain
// forward in dimension from -T0 with immigration at the killing rate, and gets
// atoms born in (0, S0] by size-biasing paths by b at dimension 0.

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rrg/rng.hpp"
#include "rrg/words.hpp"

namespace rrg {

// ---------------------------------------------------------------------------
// Closed forms

/// E exp(-2 s xi(theta)) for a Yule process started at 1: p z / (1 - (1-p) z),
/// p = e^{-theta}, z = e^{-2s}.
inline double yule_mgf(double theta, double s) {
  if (theta < 0 || s < 0) throw std::invalid_argument("yule_mgf: negative argument");
  const double p = std::exp(-theta);
  const double z = std::exp(-2.0 * s);
  return p * z / (-std::expm1(-2.0 * s) + p * z);
}

/// E exp(2 s tau), tau = number of sign changes around a j-cycle with iid fair signs.
inline double tau_mgf(int j, double s) {
  if (j < 1) throw std::invalid_argument("tau_mgf: j < 1");
  const double e = std::exp(2.0 * s);
  return (std::pow(1.0 + e, j) + std::pow(1.0 - e, j)) / std::pow(2.0, j);
}

inline double cov_U(int j, double t1, double s1, double t2, double s2) {
  if (t1 > 0 || t2 > 0 || s1 < 0 || s2 < 0) throw std::invalid_argument("cov_U: need t <= 0, s >= 0");
  const double theta = -std::max(t1, t2);
  const double s = std::abs(s1 - s2);
  return 2.0 * j * std::exp(-j * std::abs(t1 - t2)) * std::pow(yule_mgf(theta, s), j) * tau_mgf(j, s);
}

inline double cov_G(int j, double u1, double v1, double u2, double v2) {
  if (v1 < 0 || v2 < 0) throw std::invalid_argument("cov_G: need v >= 0");
  const double r = std::exp(-std::abs(u1 - u2)) / (1.0 + std::abs(v1 - v2) * std::exp(-std::max(u1, u2)));
  return 2.0 * j * std::pow(r, j);
}

/// Birth rate of atoms with word wbar seen at dimension t <= 0.
inline double birth_rate(double t, const WordStats& wbar) {
  if (t > 0) throw std::invalid_argument("birth_rate: t > 0");
  return 2.0 / wbar.h * (wbar.b - wbar.length + std::exp(-t) * wbar.length);
}

struct BirthDeathRates {
  double birth;            // 2b/h
  double death_per_atom;   // 2b
};

/// Generator of N_w(0, .): births at 2b/h, each atom dies at 2b; stationary law Poisson(1/h).
inline BirthDeathRates bd_generator(const WordStats& w) { return {2.0 * w.b / w.h, 2.0 * w.b}; }

/// sum over classes w of length j of exp(-2 s b(w)) / h(w), via the 2d x 2d transfer matrix
/// whose eigenvalues are dq+d-1, dq-d+1, -1 (d-1 times) and 1 (d-1 times), q = e^{-2s}.
inline double class_b_transform(int d, int j, double s) {
  const double q = std::exp(-2.0 * s);
  const double tr = std::pow(d * q + d - 1.0, j) + std::pow(d * q - d + 1.0, j) +
                    (d - 1.0) * (1.0 + ((j % 2) ? -1.0 : 1.0));
  return tr / (2.0 * j);
}

/// Same quantity by enumeration, for cross-checks.
inline double class_b_transform_enumerated(int d, int j, double s) {
  double acc = 0.0;
  for (const Word& w : enumerate_classes(d, j)) {
    const auto st = word_stats(w);
    acc += std::exp(-2.0 * s * st.b) / st.h;
  }
  return acc;
}

/// Sub-Markov semigroup exp(u Q) of the halving chain on the classes of the table.
inline Eigen::MatrixXd halving_semigroup(const WordClassTable& table, double u) {
  const auto m = static_cast<Eigen::Index>(table.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (std::uint32_t id = 0; id < table.size(); ++id) {
    Q(id, id) = -table.stats(id).length;
    for (const auto& t : table.halving(id)) Q(id, t.target) += t.multiplicity;
  }
  return (u * Q).exp();
}

/// Semigroup of the doubling chain with mass leaving the table at the maximal length.
inline Eigen::MatrixXd doubling_semigroup(const WordClassTable& table, double u) {
  const auto m = static_cast<Eigen::Index>(table.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (std::uint32_t id = 0; id < table.size(); ++id) {
    Q(id, id) = -table.stats(id).length;
    for (const auto& t : table.doubling(id)) Q(id, t.target) += t.multiplicity;
  }
  return (u * Q).exp();
}

struct CovInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool exact() const { return lo == hi; }
};

/// Limiting Cov(N_j(t1, s1), N_k(t2, s2)) at fixed d.
/// j == k: exp(-j|t1-t2|) e^{2sj} yule_mgf(-max t, s)^j sum_w e^{-2 s b(w)} / h(w).
/// j != k, t1 == t2: 0. j != k, t1 != t2: [0, value at s = 0], or [0, inf) when the
/// classes cannot be enumerated.
inline CovInterval cov_finite_d(int d, int j, int k, double t1, double s1, double t2, double s2) {
  if (t1 > 0 || t2 > 0 || s1 < 0 || s2 < 0) throw std::invalid_argument("cov_finite_d: need t <= 0, s >= 0");
  if (d < 1 || j < 1 || k < 1) throw std::invalid_argument("cov_finite_d: bad d, j or k");
  const double s = std::abs(s1 - s2);
  if (j == k) {
    const double v = std::exp(-j * std::abs(t1 - t2)) * std::exp(2.0 * s * j) *
                     std::pow(yule_mgf(-std::max(t1, t2), s), j) * class_b_transform(d, j, s);
    return {v, v};
  }
  if (t1 == t2) return {0.0, 0.0};
  // The longer word must sit at the larger dimension for the counts to share atoms.
  const int len_hi = t1 > t2 ? j : k;
  const int len_lo = t1 > t2 ? k : j;
  if (len_hi < len_lo) return {0.0, 0.0};
  try {
    const WordClassTable table(d, len_hi);
    const Eigen::MatrixXd P = halving_semigroup(table, std::abs(t1 - t2));
    double v = 0.0;
    for (auto w = table.begin(len_hi); w < table.end(len_hi); ++w) {
      double reach = 0.0;
      for (auto u = table.begin(len_lo); u < table.end(len_lo); ++u) reach += P(w, u);
      v += reach / table.stats(w).h;
    }
    return {0.0, v};
  } catch (const BudgetExceeded&) {
    return {0.0, std::numeric_limits<double>::infinity()};
  }
}

// ---------------------------------------------------------------------------
// Sampling helpers

/// Walker alias table over nonnegative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& w) {
    const std::size_t n = w.size();
    total_ = std::accumulate(w.begin(), w.end(), 0.0);
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    if (n == 0 || total_ <= 0) return;
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = w[i] * static_cast<double>(n) / total_;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  double total() const { return total_; }
  std::size_t size() const { return prob_.size(); }

  std::size_t sample(Rng& rng) const {
    const std::size_t i = rng.below(prob_.size());
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  double total_ = 0.0;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Picks a transition with probability proportional to its multiplicity.
inline std::uint32_t pick_transition(const std::vector<WordClassTable::Transition>& ts, int total, Rng& rng) {
  auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
  for (const auto& t : ts) {
    r -= t.multiplicity;
    if (r < 0) return t.target;
  }
  throw std::logic_error("pick_transition: multiplicities do not sum to total");
}

// ---------------------------------------------------------------------------
// Chains

inline constexpr std::uint32_t kLongWord = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::uint32_t kDeath = kLongWord - 1;

/// A chain state: a class id, or kLongWord when the word is longer than the table
/// (then only its length and b are tracked), or kDeath.
struct ChainState {
  std::uint32_t id = kDeath;
  int length = 0;
  int b = 0;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

inline ChainState state_of(const WordClassTable& table, std::uint32_t id) {
  return {id, table.stats(id).length, table.stats(id).b};
}

/// Piecewise-constant path: states[i] holds on [times[i], times[i+1]).
struct ChainTrajectory {
  std::vector<double> times;
  std::vector<ChainState> states;

  ChainState at(double u) const {
    ChainState s{kDeath, 0, 0};
    for (std::size_t i = 0; i < times.size() && times[i] <= u; ++i) s = states[i];
    return s;
  }
  bool absorbed() const { return !states.empty() && states.back().id == kDeath; }
  double death_time() const { return absorbed() ? times.back() : std::numeric_limits<double>::infinity(); }
  const ChainState& final_state() const { return states.back(); }
};

/// Halving chain from class id over [0, horizon]: moves to u at rate equal to the
/// multiplicity of u in halvings(w), and is killed at rate |w| - c(w) (plus 1 for
/// length-1 words, whose only halving is death). Total holding rate is |w|.
inline ChainTrajectory halving_chain(const WordClassTable& table, std::uint32_t id, double horizon, Rng& rng) {
  ChainTrajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(state_of(table, id));
  double u = 0.0;
  for (;;) {
    const int len = table.stats(id).length;
    u += rng.exponential(len);
    if (u > horizon) break;
    const auto r = static_cast<double>(rng.below(static_cast<std::uint64_t>(len)));
    if (r < table.death_rate(id)) {
      tr.times.push_back(u);
      tr.states.push_back({kDeath, 0, 0});
      break;
    }
    id = pick_transition(table.halving(id), len - static_cast<int>(table.death_rate(id)), rng);
    tr.times.push_back(u);
    tr.states.push_back(state_of(table, id));
  }
  return tr;
}

namespace detail {

/// One doubling jump of a uniformly chosen letter.
inline ChainState double_once(const WordClassTable& table, const ChainState& s, Rng& rng) {
  if (s.id == kLongWord || table.doubling(s.id).empty()) return {kLongWord, s.length + 1, s.b + 1};
  const std::uint32_t id = pick_transition(table.doubling(s.id), s.length, rng);
  return state_of(table, id);
}

/// Plain doubling dynamics on (a, b]; appends jumps to tr.
inline ChainState run_doubling(const WordClassTable& table, ChainState s, double a, double b, Rng& rng,
                               ChainTrajectory& tr) {
  double u = a;
  for (;;) {
    u += rng.exponential(s.length);
    if (u > b) return s;
    s = double_once(table, s, rng);
    tr.times.push_back(u);
    tr.states.push_back(s);
  }
}

/// Doubling path on (a, b] size-biased by the word length at b.
inline ChainState run_doubling_length_biased(const WordClassTable& table, ChainState s, double a, double b,
                                             Rng& rng, ChainTrajectory& tr) {
  const double x = b - a;
  if (rng.uniform() < std::exp(-x)) return run_doubling(table, s, a, b, rng, tr);
  // Palm at a doubling event whose time has density proportional to e^y on [0, x].
  const double y = std::log1p(rng.uniform() * std::expm1(x));
  s = run_doubling_length_biased(table, s, a, a + y, rng, tr);
  s = double_once(table, s, rng);
  tr.times.push_back(a + y);
  tr.states.push_back(s);
  return run_doubling(table, s, a + y, b, rng, tr);
}

}  // namespace detail

/// Doubling chain from class id over [0, horizon]: each letter doubles at rate 1.
/// Words longer than the table continue as (length, b) only.
inline ChainTrajectory doubling_chain(const WordClassTable& table, std::uint32_t id, double horizon, Rng& rng) {
  ChainTrajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(state_of(table, id));
  detail::run_doubling(table, tr.states.back(), 0.0, horizon, rng, tr);
  return tr;
}

// ---------------------------------------------------------------------------
// Atoms and field samples

struct Atom {
  double z = 0.0;  // birth time
  double v = 0.0;  // lifetime (inf when b = 0)
  std::uint32_t word = 0;
  bool exists_at(double s) const { return z <= s && s < z + v; }
};

/// Atoms at z = 0 (Poisson(1/h) per class, Exp(2b) residual lifetimes) and births on
/// (0, S0] at rate 2b/h, for every class in the table. Each length uses its own
/// substream, so tables of different maximal length agree on their common lengths.
inline std::vector<Atom> sample_chi(const WordClassTable& table, double S0, Rng& rng) {
  std::vector<Atom> out;
  for (int k = 1; k <= table.max_len(); ++k) {
    Rng rk = rng.split(static_cast<std::uint64_t>(k));
    const auto lo = table.begin(k), hi = table.end(k);
    std::vector<double> w0, wb;
    for (auto id = lo; id < hi; ++id) {
      w0.push_back(1.0 / table.stats(id).h);
      wb.push_back(2.0 * table.stats(id).b / table.stats(id).h);
    }
    const AliasTable a0(w0), ab(wb);
    const auto n0 = rk.poisson(a0.total());
    for (std::uint64_t i = 0; i < n0; ++i) {
      const auto id = lo + static_cast<std::uint32_t>(a0.sample(rk));
      out.push_back({0.0, rk.exponential(2.0 * table.stats(id).b), id});
    }
    const auto nb = rk.poisson(ab.total() * S0);
    for (std::uint64_t i = 0; i < nb; ++i) {
      const auto id = lo + static_cast<std::uint32_t>(ab.sample(rk));
      const double z = S0 * rk.uniform_pos();
      out.push_back({z, rk.exponential(2.0 * table.stats(id).b), id});
    }
  }
  return out;
}

/// counts[(i * ns + j) * classes + w] = N_w(t_i, s_j) for classes w of length <= K.
struct LimitFieldSample {
  std::vector<double> t;
  std::vector<double> s;
  int K = 0;
  std::uint32_t classes = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t& at(std::size_t i, std::size_t j, std::uint32_t w) {
    return counts[(i * s.size() + j) * classes + w];
  }
  std::uint32_t at(std::size_t i, std::size_t j, std::uint32_t w) const {
    return counts[(i * s.size() + j) * classes + w];
  }
  /// N_k(t_i, s_j): total over classes of length k.
  std::uint64_t length_count(const WordClassTable& table, std::size_t i, std::size_t j, int k) const {
    std::uint64_t c = 0;
    for (auto w = table.begin(k); w < table.end(k); ++w) c += at(i, j, w);
    return c;
  }
};

inline LimitFieldSample empty_sample(const WordClassTable& table, int K, const std::vector<double>& t,
                                     const std::vector<double>& s) {
  if (K < 1 || K > table.max_len()) throw std::invalid_argument("limit field: need 1 <= K <= table length");
  for (double ti : t) {
    if (ti > 0) throw std::invalid_argument("limit field: t must be <= 0");
  }
  LimitFieldSample out;
  out.t = t;
  out.s = s;
  out.K = K;
  out.classes = table.end(K);
  out.counts.assign(t.size() * s.size() * out.classes, 0);
  return out;
}

/// The defining construction truncated at the table's maximal length L.
inline LimitFieldSample sample_limit_field(const WordClassTable& table, int K, double T0, double S0,
                                                     const std::vector<double>& t, const std::vector<double>& s,
                                                     Rng& rng) {
  LimitFieldSample out = empty_sample(table, K, t, s);
  for (double ti : t) {
    if (ti < -T0) throw std::invalid_argument("limit field: t below -T0");
  }
  const auto atoms = sample_chi(table, S0, rng);
  Rng chain_rng = rng.split(0xC4A1u);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Atom& atom = atoms[a];
    bool alive = false;
    for (double sj : s) alive = alive || atom.exists_at(sj);
    if (!alive) continue;
    Rng r = chain_rng.split(a);
    const auto tr = halving_chain(table, atom.word, T0, r);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const ChainState st = tr.at(-t[i]);
      if (st.id >= out.classes) continue;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (atom.exists_at(s[j])) ++out.at(i, j, st.id);
      }
    }
  }
  return out;
}

/// An atom of the limit field with its path over dimensions [start, 0]: path.at(t)
/// is the atom's word at dimension t. `word` is the class at dimension `start`.
struct LimitAtom {
  Atom atom;
  double start = 0.0;
  ChainTrajectory path;
};

/// Exact atoms through the dual doubling chain: every atom that has a class of
/// length <= K at some dimension in [-T0, 0] and exists at some time in [0, S0].
inline std::vector<LimitAtom> limit_atoms_exact(const WordClassTable& table, int K, double T0, double S0, Rng& rng) {
  if (K < 1 || K > table.max_len()) throw std::invalid_argument("limit field: need 1 <= K <= table length");
  if (T0 < 0 || S0 < 0) throw std::invalid_argument("limit field: need T0, S0 >= 0");
  const std::uint32_t nc = table.end(K);
  const double eT = std::expm1(T0);

  // Path sources: class at -T0 (weight 1/h) or immigration on (-T0, 0] at rate kill/h.
  // Atoms existing at time 0 use these weights; births use them times 2 S0 E[b at dimension 0].
  std::vector<double> w_exist, w_birth;
  for (std::uint32_t id = 0; id < nc; ++id) {
    const auto& st = table.stats(id);
    const double h = st.h, kill = table.death_rate(id);
    w_exist.push_back(1.0 / h);
    w_exist.push_back(kill * T0 / h);
    w_birth.push_back(2.0 * S0 / h * (st.b + st.length * eT));
    w_birth.push_back(2.0 * S0 * kill / h * (st.b * T0 + st.length * (eT - T0)));
  }
  const AliasTable exist_alias(w_exist), birth_alias(w_birth);
  std::vector<LimitAtom> out;

  Rng re = rng.split(1);
  const auto n_exist = re.poisson(exist_alias.total());
  for (std::uint64_t a = 0; a < n_exist; ++a) {
    Rng r = re.split(a);
    const std::size_t pick = exist_alias.sample(r);
    const auto id = static_cast<std::uint32_t>(pick / 2);
    LimitAtom la;
    la.start = (pick % 2) ? -T0 * r.uniform() : -T0;
    la.path.times.push_back(la.start);
    la.path.states.push_back(state_of(table, id));
    const ChainState end = detail::run_doubling(table, la.path.states.back(), la.start, 0.0, r, la.path);
    la.atom = {0.0, r.exponential(2.0 * end.b), id};
    out.push_back(std::move(la));
  }

  Rng rb = rng.split(2);
  const auto n_birth = rb.poisson(birth_alias.total());
  for (std::uint64_t a = 0; a < n_birth; ++a) {
    Rng r = rb.split(a);
    const std::size_t pick = birth_alias.sample(r);
    const auto id = static_cast<std::uint32_t>(pick / 2);
    const auto& st = table.stats(id);
    const bool immigrant = pick % 2;
    // Split E[b_0] = b + |w| E[#doublings] into its two components.
    const double mass_b = immigrant ? st.b * T0 : st.b;
    const double mass_d = immigrant ? st.length * (eT - T0) : st.length * eT;
    const bool palm = r.uniform() * (mass_b + mass_d) >= mass_b;
    double span;  // dimension span of the path
    if (!immigrant) {
      span = T0;
    } else if (!palm) {
      span = T0 * r.uniform();
    } else {
      // density proportional to e^x - 1 on [0, T0]
      do {
        span = std::log1p(r.uniform() * eT);
      } while (r.uniform() >= -std::expm1(-span));
    }
    LimitAtom la;
    la.start = -span;
    la.path.times.push_back(la.start);
    la.path.states.push_back(state_of(table, id));
    ChainState end;
    if (!palm) {
      end = detail::run_doubling(table, la.path.states.back(), la.start, 0.0, r, la.path);
    } else {
      // A marked doubling at offset y (density proportional to e^y); the path before it is
      // biased by the length at y, the path after it is plain.
      const double y = std::log1p(r.uniform() * std::expm1(span));
      ChainState mid =
          detail::run_doubling_length_biased(table, la.path.states.back(), la.start, la.start + y, r, la.path);
      mid = detail::double_once(table, mid, r);
      la.path.times.push_back(la.start + y);
      la.path.states.push_back(mid);
      end = detail::run_doubling(table, mid, la.start + y, 0.0, r, la.path);
    }
    const double z = S0 * r.uniform_pos();
    la.atom = {z, r.exponential(2.0 * end.b), id};
    out.push_back(std::move(la));
  }
  return out;
}

/// Exact sampler through the dual doubling chain; needs a table of length >= K only.
inline LimitFieldSample sample_limit_field_exact(const WordClassTable& table, int K, double T0, double S0,
                                                 const std::vector<double>& t, const std::vector<double>& s,
                                                 Rng& rng) {
  LimitFieldSample out = empty_sample(table, K, t, s);
  for (double ti : t) {
    if (ti < -T0) throw std::invalid_argument("limit field: t below -T0");
  }
  for (const LimitAtom& la : limit_atoms_exact(table, K, T0, S0, rng)) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < la.start) continue;
      const ChainState st = la.path.at(t[i]);
      if (st.id >= out.classes) continue;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (la.atom.exists_at(s[j])) ++out.at(i, j, st.id);
      }
    }
  }
  return out;
}

/// X_k(t_i, s_j) = (2d-1)^{-k/2} (2k N_k - a(d, k)), row-major over (i, j).
inline std::vector<double> scaled_X(const LimitFieldSample& sample, const WordClassTable& table, int k) {
  if (k > sample.K) throw std::invalid_argument("scaled_X: k > K");
  const int d = table.d();
  const double a = static_cast<double>(a_count(d, k));
  const double scale = std::pow(2.0 * d - 1.0, -k / 2.0);
  std::vector<double> out;
  for (std::size_t i = 0; i < sample.t.size(); ++i) {
    for (std::size_t j = 0; j < sample.s.size(); ++j) {
      out.push_back(scale * (2.0 * k * static_cast<double>(sample.length_count(table, i, j, k)) - a));
    }
  }
  return out;
}

}  // namespace rrg
