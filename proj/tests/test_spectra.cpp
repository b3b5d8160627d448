#include <gtest/gtest.h>

#include <tuple>

#include <cmath>

#include "rrg/spectra.hpp"

using namespace rrg;

namespace {

MultiGraph random_graph(int d, std::size_t n, std::uint64_t seed) {
  Rng r(seed);
  std::vector<Permutation> ps;
  for (int i = 0; i < d; ++i) {
    PermutationTower t;
    t.grow(n, r);
    ps.push_back(t.top());
  }
  return MultiGraph(ps);
}

}  // namespace

TEST(Spectra, Mobius) {
  EXPECT_EQ(mobius(1), 1);
  EXPECT_EQ(mobius(4), 0);
  EXPECT_EQ(mobius(6), 1);
  EXPECT_EQ(mobius(7), -1);
  EXPECT_EQ(mobius(30), -1);
}

TEST(Spectra, Chebyshev) {
  EXPECT_EQ(chebyshev_T(2).c, (std::vector<double>{-1, 0, 2}));
  EXPECT_EQ(chebyshev_T(3).c, (std::vector<double>{0, -3, 0, 4}));
  for (int k = 0; k <= 20; ++k) {
    for (double x : {-0.9, -0.2, 0.4, 0.95}) EXPECT_NEAR(chebyshev_T(k)(x), std::cos(k * std::acos(x)), 1e-9);
  }
  EXPECT_NEAR(chebyshev_T(64).c.back(), std::ldexp(1.0, 63), 1.0);
}

TEST(Spectra, GammaPolys) {
  EXPECT_EQ(gamma_poly(0, 2).c, (std::vector<double>{1}));
  EXPECT_EQ(gamma_poly(2, 1).c, (std::vector<double>{-2, 0, 4}));
  const auto g = gamma_poly(2, 2).c;
  EXPECT_NEAR(g[0], -2 + 2.0 / 3, 1e-15);
  EXPECT_EQ(g[2], 4.0);
}

TEST(Spectra, FBasis) {
  for (int d : {1, 2, 3}) {
    const auto f1 = f_basis(1, d);
    EXPECT_NEAR(f1.c[1], std::sqrt(2.0 * d - 1), 1e-14);
    EXPECT_NEAR(f1.c[0], 0.0, 1e-14);
    for (int k = 1; k <= 10; ++k) {
      const auto f = f_basis(k, d);
      EXPECT_EQ(f.degree(), k);
      EXPECT_NE(f.c.back(), 0.0);
    }
  }
}

TEST(Spectra, SmallGraphs) {
  const MultiGraph loop({Permutation::identity(1)});
  EXPECT_EQ(scaled_eigenvalues(loop), std::vector<double>{1.0});
  EXPECT_NEAR(trace_gamma(loop, 1), 2.0, 1e-12);
  const MultiGraph dbl({Permutation::from_cycles(2, {{1, 2}})});
  const auto ev = scaled_eigenvalues(dbl);
  EXPECT_NEAR(ev[0], 1.0, 1e-12);
  EXPECT_NEAR(ev[1], -1.0, 1e-12);
  EXPECT_NEAR(trace_gamma(dbl, 2), 4.0, 1e-12);
}

TEST(Spectra, TopEigenvalueAndResidual) {
  for (int d : {1, 2, 3}) {
    const auto g = random_graph(d, 60, 10 + d);
    const auto ev = scaled_eigenvalues(g);
    EXPECT_NEAR(ev.front(), d / std::sqrt(2.0 * d - 1), 1e-9);
    EXPECT_LT(eigen_residual(g), 1e-9);
  }
}

TEST(Spectra, TraceIdentity) {
  for (int d : {1, 2, 3}) {
    const auto g = random_graph(d, 200, 20 + d);
    const auto rep = spectral_report(g, 10, false);
    EXPECT_LT(rep.max_residual(), 1e-6) << d;
  }
}

TEST(Spectra, FTraceCountsCyclesWhenTangleFree) {
  int checked = 0;
  for (auto [d, n, kk] : {std::tuple{1, 200, 6}, std::tuple{2, 400, 2}}) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      const auto g = random_graph(d, static_cast<std::size_t>(n), 300 + seed);
      const auto rep = spectral_report(g, kk, true);
      if (!rep.tangle_free) continue;
      ++checked;
      for (const auto& r : rep.rows) EXPECT_NEAR(r.f_trace, static_cast<double>(r.cycle_count), 1e-6) << r.k;
    }
  }
  EXPECT_GT(checked, 12);
}

TEST(Spectra, FTraceMatchesPolynomialEvaluation) {
  const auto g = random_graph(2, 100, 5);
  const auto ev = scaled_eigenvalues(g);
  const auto tg = trace_gammas(ev, 2, 6);
  for (int k = 1; k <= 6; ++k) {
    const auto f = f_basis(k, 2);
    double direct = 0;
    for (double x : ev) direct += f(x);
    EXPECT_NEAR(f_trace(tg, k, 2), direct, 1e-8);
  }
}
