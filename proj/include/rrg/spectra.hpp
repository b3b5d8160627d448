#pragma once

// Scaled adjacency spectra, Chebyshev and Gamma polynomials, and the
// Moebius-inverted basis whose traces count cycles on tangle-free graphs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rrg/cycles.hpp"

namespace rrg {

inline constexpr int kMaxPolyDegree = 64;

/// Monomial coefficients, c[i] multiplies x^i.
struct PolynomialCoeffs {
  std::vector<double> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  void trim() {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  }
};

inline int mobius(int n) {
  if (n < 1) throw std::invalid_argument("mobius: n < 1");
  int mu = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

/// T_k with exact integer recurrence T_{k+1} = 2x T_k - T_{k-1}.
inline PolynomialCoeffs chebyshev_T(int k) {
  if (k < 0 || k > kMaxPolyDegree) throw std::invalid_argument("chebyshev_T: degree out of range");
  std::vector<__int128> prev{1}, cur{0, 1};
  if (k == 0) return {{1.0}};
  for (int m = 1; m < k; ++m) {
    std::vector<__int128> next(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  PolynomialCoeffs p;
  for (auto v : cur) p.c.push_back(static_cast<double>(v));
  p.trim();
  return p;
}

/// Constant added to 2 T_k: (2d-2)/(2d-1)^{k/2} for even k, 0 for odd k.
inline double gamma_shift(int k, int d) {
  if (k % 2) return 0.0;
  return (2.0 * d - 2.0) / std::pow(2.0 * d - 1.0, k / 2);
}

/// Gamma_0 = 1, Gamma_k = 2 T_k + shift.
inline PolynomialCoeffs gamma_poly(int k, int d) {
  if (k == 0) return {{1.0}};
  PolynomialCoeffs p = chebyshev_T(k);
  for (double& v : p.c) v *= 2.0;
  p.c[0] += gamma_shift(k, d);
  return p;
}

/// f_k = (1/2k) sum_{j | k} mu(k/j) (2d-1)^{j/2} Gamma_j.
inline PolynomialCoeffs f_basis(int k, int d) {
  if (k < 1) throw std::invalid_argument("f_basis: k < 1");
  PolynomialCoeffs out{std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0)};
  for (int j = 1; j <= k; ++j) {
    if (k % j) continue;
    const int mu = mobius(k / j);
    if (!mu) continue;
    const double w = mu * std::pow(2.0 * d - 1.0, j / 2.0) / (2.0 * k);
    const PolynomialCoeffs g = gamma_poly(j, d);
    for (std::size_t i = 0; i < g.c.size(); ++i) out.c[i] += w * g.c[i];
  }
  out.trim();
  return out;
}

/// Eigenvalues of the adjacency matrix divided by 2 sqrt(2d-1), in decreasing order.
inline std::vector<double> scaled_eigenvalues(const MultiGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Dart e = 0; e < g.dart_count(); ++e) A(g.tail(e), g.head(e)) += 1.0;
  if (!A.isApprox(A.transpose(), 0.0)) throw std::logic_error("adjacency matrix is not symmetric");
  std::vector<double> out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const double scale = 1.0 / (2.0 * std::sqrt(2.0 * g.d() - 1.0));
  out.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(n - 1 - i) * scale;
  return out;
}

/// Largest residual ||A v - mu v|| over eigenpairs of the unscaled adjacency matrix.
inline double eigen_residual(const MultiGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Dart e = 0; e < g.dart_count(); ++e) A(g.tail(e), g.head(e)) += 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    worst = std::max(worst, (A * v - es.eigenvalues()(i) * v).norm());
  }
  return worst;
}

/// sum_i Gamma_k(lambda_i) for k = 0..kmax, with T_k by the three-term recurrence.
inline std::vector<double> trace_gammas(const std::vector<double>& lambda, int d, int kmax) {
  std::vector<double> t(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (double x : lambda) {
    double prev = 1.0, cur = x;
    t[0] += 1.0;
    for (int k = 1; k <= kmax; ++k) {
      t[static_cast<std::size_t>(k)] += 2.0 * cur;
      const double next = 2.0 * x * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  const double n = static_cast<double>(lambda.size());
  for (int k = 1; k <= kmax; ++k) t[static_cast<std::size_t>(k)] += n * gamma_shift(k, d);
  return t;
}

inline double trace_gamma(const MultiGraph& g, int k) {
  return trace_gammas(scaled_eigenvalues(g), g.d(), k)[static_cast<std::size_t>(k)];
}

/// sum_i f_k(lambda_i) from Gamma traces.
inline double f_trace(const std::vector<double>& gamma_traces, int k, int d) {
  double s = 0.0;
  for (int j = 1; j <= k; ++j) {
    if (k % j) continue;
    s += mobius(k / j) * std::pow(2.0 * d - 1.0, j / 2.0) * gamma_traces[static_cast<std::size_t>(j)];
  }
  return s / (2.0 * k);
}

struct SpectralRow {
  int k = 0;
  double trace_gamma = 0.0;
  std::uint64_t cnbw = 0;
  double residual = 0.0;
  double f_trace = 0.0;
  std::uint64_t cycle_count = 0;
};

struct SpectralReport {
  std::vector<double> eigenvalues;
  std::vector<SpectralRow> rows;
  bool tangle_free = false;
  double max_residual() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::abs(r.residual));
    return m;
  }
};

inline SpectralReport spectral_report(const MultiGraph& g, int kmax, bool with_cycles = true) {
  SpectralReport rep;
  rep.eigenvalues = scaled_eigenvalues(g);
  const int d = g.d();
  const auto tg = trace_gammas(rep.eigenvalues, d, kmax);
  const auto cn = cnbw_counts(g, static_cast<std::size_t>(kmax));
  std::vector<std::uint64_t> cc;
  if (with_cycles) {
    cc = cycle_counts(g, static_cast<std::size_t>(kmax));
    rep.tangle_free = is_tangle_free(g, static_cast<std::size_t>(kmax), static_cast<std::size_t>(kmax));
  }
  for (int k = 1; k <= kmax; ++k) {
    SpectralRow r;
    r.k = k;
    r.trace_gamma = tg[static_cast<std::size_t>(k)];
    r.cnbw = cn[static_cast<std::size_t>(k)];
    r.residual = r.trace_gamma - std::pow(2.0 * d - 1.0, -k / 2.0) * static_cast<double>(r.cnbw);
    r.f_trace = f_trace(tg, k, d);
    r.cycle_count = with_cycles ? cc[static_cast<std::size_t>(k)] : 0;
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace rrg
