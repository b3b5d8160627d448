#pragma once

// Estimators, standard errors and verdicts for the Monte Carlo checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrg {

/// verdict: |estimate - reference| <= tolerance * max(se, floor).
struct StatReport {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double reference = 0.0;
  double z = 0.0;
  bool pass = false;
  double tolerance = 3.0;
  double floor = 0.0;
  double runtime = 0.0;
  bool counts_toward_allowance = true;  // a "within tolerance SE" test
};

inline StatReport make_report(std::string name, double estimate, double se, double reference, double tolerance = 3.0,
                              double floor = 0.0) {
  StatReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.reference = reference;
  r.tolerance = tolerance;
  r.floor = floor;
  const double scale = std::max(se, floor);
  const double diff = std::abs(estimate - reference);
  r.z = scale > 0 ? (estimate - reference) / scale : (diff == 0 ? 0.0 : std::copysign(INFINITY, estimate - reference));
  r.pass = diff <= tolerance * scale;
  return r;
}

/// A hard gate: estimate must lie in [lo, hi]; se is informational.
inline StatReport make_bound_report(std::string name, double estimate, double se, double reference, double lo,
                                    double hi) {
  StatReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.reference = reference;
  r.z = se > 0 ? (estimate - reference) / se : 0.0;
  r.pass = estimate >= lo && estimate <= hi;
  r.tolerance = 0.0;
  r.counts_toward_allowance = false;
  return r;
}

/// Failures permitted among n tests at the 3-SE level: one per started hundred.
inline std::size_t failure_allowance(std::size_t n) { return (n + 99) / 100; }

/// True when every hard gate passes and the 3-SE failures fit the allowance.
inline bool suite_passes(const std::vector<StatReport>& reports) {
  std::size_t n = 0, failed = 0;
  for (const auto& r : reports) {
    if (!r.counts_toward_allowance) {
      if (!r.pass) return false;
      continue;
    }
    ++n;
    if (!r.pass) ++failed;
  }
  return failed <= failure_allowance(n);
}

/// Mergeable running mean and variance.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double tot = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / tot;
    m2 += o.m2 + d * d * n * o.n / tot;
    n = tot;
  }
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double se() const { return n > 1 ? std::sqrt(variance() / n) : 0.0; }
};

inline double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample mean with a batch-means standard error.
inline Estimate batch_mean(const std::vector<double>& x, std::size_t batches = 100) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("batch_mean: need at least two values");
  batches = std::min(batches, n);
  const std::size_t per = n / batches;
  Moments bm;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += x[i];
    bm.add(s / static_cast<double>(per));
  }
  return {mean_of(x), std::sqrt(bm.variance() / static_cast<double>(batches))};
}

inline double sample_covariance(const double* x, const double* y, std::size_t n) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) c += (x[i] - mx) * (y[i] - my);
  return c / static_cast<double>(n - 1);
}

/// Sample covariance with a batch-means standard error.
inline Estimate batch_covariance(const std::vector<double>& x, const std::vector<double>& y,
                                 std::size_t batches = 100) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 4) throw std::invalid_argument("batch_covariance: bad sizes");
  batches = std::min(batches, n / 2);
  const std::size_t per = n / batches;
  Moments bm;
  for (std::size_t b = 0; b < batches; ++b) bm.add(sample_covariance(&x[b * per], &y[b * per], per));
  return {sample_covariance(x.data(), y.data(), n), std::sqrt(bm.variance() / static_cast<double>(batches))};
}

inline double sample_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double c = sample_covariance(x.data(), y.data(), x.size());
  const double vx = sample_covariance(x.data(), x.data(), x.size());
  const double vy = sample_covariance(y.data(), y.data(), y.size());
  return c / std::sqrt(vx * vy);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// sup |F_n - F| for a continuous F.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

inline std::vector<double> poisson_pmf(double mean, std::size_t support) {
  std::vector<double> p(support + 1);
  p[0] = std::exp(-mean);
  for (std::size_t k = 1; k <= support; ++k) p[k] = p[k - 1] * mean / static_cast<double>(k);
  return p;
}

/// Total variation between the empirical law of counts and Poisson(mean) on
/// {0..support}, with the tail mass of both folded into the last bin.
inline double poisson_tv(const std::vector<std::uint64_t>& counts, double mean, std::size_t support = 20) {
  std::vector<double> emp(support + 1, 0.0);
  for (auto c : counts) emp[std::min<std::uint64_t>(c, support)] += 1.0;
  auto ref = poisson_pmf(mean, support);
  double head = 0.0;
  for (std::size_t k = 0; k < support; ++k) head += ref[k];
  ref[support] = std::max(0.0, 1.0 - head);
  double tv = 0.0;
  for (std::size_t k = 0; k <= support; ++k) tv += std::abs(emp[k] / static_cast<double>(counts.size()) - ref[k]);
  return tv / 2.0;
}

}  // namespace rrg
