#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rrg/rng.hpp"

using rrg::Rng;

TEST(Philox, KnownAnswerZero) {
  const auto out = rrg::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = rrg::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Rng, Reproducible) {
  Rng a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Rng, SplitIgnoresPosition) {
  Rng a(1, 2);
  Rng s1 = a.split(5);
  a();
  a();
  Rng s2 = a.split(5);
  EXPECT_EQ(s1(), s2());
  EXPECT_NE(a.split(5).stream(), a.split(6).stream());
}

TEST(Rng, BelowRangeAndMean) {
  Rng r(11);
  double sum = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const auto x = r.below(10);
    ASSERT_LT(x, 10u);
    sum += static_cast<double>(x);
  }
  const double se = std::sqrt(99.0 / 12.0 / N);
  EXPECT_NEAR(sum / N, 4.5, 4 * se);
}

TEST(Rng, ExponentialMean) {
  Rng r(12);
  double sum = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) sum += r.exponential(2.0);
  EXPECT_NEAR(sum / N, 0.5, 4 * 0.5 / std::sqrt(N));
  EXPECT_TRUE(std::isinf(r.exponential(0.0)));
}

TEST(Rng, PoissonMeanAndVariance) {
  for (double mean : {0.3, 4.0, 55.0}) {
    Rng r(13);
    double s = 0, s2 = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
      const double x = static_cast<double>(r.poisson(mean));
      s += x;
      s2 += x * x;
    }
    const double m = s / N;
    EXPECT_NEAR(m, mean, 4 * std::sqrt(mean / N));
    EXPECT_NEAR(s2 / N - m * m, mean, 0.05 * mean + 0.01);
  }
}
