#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "rrg/dynamics.hpp"

using namespace rrg;

namespace {

// Literal successive removal of sigma_s(n), ..., sigma_s(m+1), tracking relabels.
std::vector<Permutation> project_by_deletion(const std::vector<Permutation>& top, const Permutation& sigma,
                                             std::size_t m) {
  const std::size_t n = sigma.size();
  std::vector<Permutation> cur;
  for (const auto& pi : top) cur.push_back(sigma * pi);
  std::vector<long> label(n);  // original label -> current label, -1 if removed
  for (std::size_t x = 0; x < n; ++x) label[x] = static_cast<long>(x);
  for (std::size_t k = n; k > m; --k) {
    const Label orig = sigma(static_cast<Label>(k - 1));
    const Label now = static_cast<Label>(label[orig]);
    for (auto& p : cur) p = crp_delete(p, now);
    label[orig] = -1;
    for (auto& l : label) {
      if (l > static_cast<long>(now)) --l;
    }
  }
  return cur;
}

}  // namespace

TEST(Dynamics, EmptyLogAtZero) {
  Rng r(1);
  EXPECT_TRUE(evolve(10, 0.0, r).events.empty());
  EXPECT_TRUE(evolve(1, 5.0, r).events.empty());
}

TEST(Dynamics, EventCountMean) {
  Rng r(2);
  const int N = 10000;
  double s = 0;
  for (int i = 0; i < N; ++i) {
    const auto log = evolve(100, 1.0, r);
    s += static_cast<double>(log.events.size());
    for (const auto& e : log.events) ASSERT_NE(e.i, e.j);
  }
  EXPECT_NEAR(s / N, 100.0, 3 * std::sqrt(100.0 / N));
}

TEST(Dynamics, PairRatesUniform) {
  Rng r(3);
  std::map<std::pair<Label, Label>, int> c;
  int total = 0;
  for (int i = 0; i < 2000; ++i) {
    for (const auto& e : evolve(4, 10.0, r).events) {
      ++c[{std::min(e.i, e.j), std::max(e.i, e.j)}];
      ++total;
    }
  }
  ASSERT_EQ(c.size(), 6u);
  for (const auto& [k, v] : c) EXPECT_NEAR(v, total / 6.0, 4 * std::sqrt(total / 6.0));
}

TEST(Dynamics, SigmaExample) {
  TranspositionLog log;
  log.n = 3;
  log.events = {{0.1, 0, 1}, {0.2, 1, 2}};
  EXPECT_EQ(sigma_at(log, 0.05), Permutation::identity(3));
  const auto s = sigma_at(log, 0.25);
  EXPECT_EQ(s(0), 2u);
  EXPECT_EQ(s(1), 0u);
  EXPECT_EQ(s(2), 1u);
  log.events.push_back({0.3, 1, 2});
  EXPECT_EQ(sigma_at(log, 0.35), sigma_at(log, 0.15));
}

TEST(Dynamics, CursorMatchesReplay) {
  Rng r(4);
  const auto log = evolve(30, 2.0, r);
  SigmaCursor cur(log);
  for (double s : {0.0, 0.3, 0.3, 1.0, 1.7, 2.0}) EXPECT_EQ(cur.advance_to(s), sigma_at(log, s));
}

TEST(Dynamics, ProjectMatchesLiteralDeletion) {
  Rng r(5);
  for (int rep = 0; rep < 30; ++rep) {
    const auto st = make_field_state(2, 25, 0.0, 1.5, r);
    for (double s : {0.0, 0.7, 1.5}) {
      std::vector<Permutation> top;
      for (const auto& t : st.towers) top.push_back(t.top());
      const auto sigma = sigma_at(st.log, s);
      for (std::size_t m : {0ul, 1ul, 7ul, 24ul, 25ul}) {
        const auto a = project(top, sigma, m);
        const auto b = project_by_deletion(top, sigma, m);
        ASSERT_EQ(a.size(), 2u);
        for (std::size_t i = 0; i < 2; ++i) {
          ASSERT_EQ(a[i], b[i]);
          ASSERT_EQ(a[i].size(), m);
        }
      }
    }
  }
}

TEST(Dynamics, ProjectAtZeroIsTowerLevel) {
  Rng r(6);
  const auto st = make_field_state(3, 40, 0.0, 1.0, r);
  for (std::size_t m : {0ul, 5ul, 39ul, 40ul}) {
    const auto p = project(st, 0.0, m);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], st.towers[static_cast<std::size_t>(i)].level(m));
  }
}

TEST(Dynamics, TimeEvolutionKeepsUniformity) {
  // sigma_s * pi on S_3 stays uniform.
  Rng r(7);
  std::map<std::vector<Label>, int> c;
  const int N = 30000;
  for (int i = 0; i < N; ++i) {
    Rng rep = r.split(static_cast<std::uint64_t>(i));
    const auto st = make_field_state(1, 3, 0.0, 0.4, rep);
    ++c[project(st, 0.4, 3)[0].map()];
  }
  ASSERT_EQ(c.size(), 6u);
  for (const auto& [k, v] : c) EXPECT_NEAR(v, N / 6.0, 4 * std::sqrt(N * 5.0 / 36));
}

TEST(Dynamics, GridCoupling) {
  Rng a(8), b(8);
  const GridSpec g{3, 2};
  const auto ga = field_grid(2, 5.0, 1.0, 0.5, g, a);
  const auto gb = field_grid(2, 5.0, 1.0, 0.5, g, b);
  ASSERT_EQ(ga.cells.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(ga.cells[i][j], gb.cells[i][j]);
      EXPECT_EQ(ga.cells[i][j][0].size(), ga.sizes[i]);
    }
  }
  EXPECT_LE(ga.sizes[0], ga.sizes[1]);
  EXPECT_LE(ga.sizes[1], ga.sizes[2]);
  EXPECT_DOUBLE_EQ(ga.t[0], -1.0);
  EXPECT_DOUBLE_EQ(ga.s[1], 0.5);
}
