#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "rrg/cycles.hpp"
#include "rrg/dynamics.hpp"

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

// Oracle: all closed dart sequences with distinct vertices and no immediate
// (cyclic) reversal, modulo rotation and reversal, found by exhaustive search.
std::map<std::size_t, std::size_t> brute_cycles(const MultiGraph& g, std::size_t K) {
  std::set<std::vector<Dart>> seen;
  std::vector<Dart> path;
  auto canon = [&](std::vector<Dart> c) {
    std::vector<Dart> best;
    for (int rev = 0; rev < 2; ++rev) {
      if (rev) {
        std::reverse(c.begin(), c.end());
        for (auto& e : c) e = g.reversal(e);
      }
      for (std::size_t s = 0; s < c.size(); ++s) {
        std::vector<Dart> r(c.begin() + s, c.end());
        r.insert(r.end(), c.begin(), c.begin() + s);
        if (best.empty() || r < best) best = r;
      }
    }
    return best;
  };
  auto rec = [&](auto&& self) -> void {
    const std::size_t k = path.size();
    if (g.head(path.back()) == g.tail(path.front())) {
      if (path.front() != g.reversal(path.back())) seen.insert(canon(path));
      return;
    }
    if (k == K) return;
    const Label v = g.head(path.back());
    for (Dart e : path) {
      if (g.tail(e) == v) return;
    }
    for (std::size_t c = 0; c < g.out_degree(); ++c) {
      const Dart e = g.dart(v, static_cast<LetterCode>(c));
      if (e == g.reversal(path.back())) continue;
      path.push_back(e);
      self(self);
      path.pop_back();
    }
  };
  for (Dart e = 0; e < g.dart_count(); ++e) {
    path = {e};
    rec(rec);
  }
  std::map<std::size_t, std::size_t> out;
  for (const auto& c : seen) ++out[c.size()];
  return out;
}

}  // namespace

TEST(Graph, SingleLoop) {
  const MultiGraph g({Permutation::identity(1)});
  EXPECT_EQ(g.adjacency(), (std::vector<std::vector<int>>{{2}}));
  const auto cyc = enumerate_cycles(g, 3);
  ASSERT_EQ(cyc.size(), 1u);
  EXPECT_EQ(cyc[0].word, Word::parse("p1"));
  EXPECT_EQ(cnbw_count(g, 1), 2u);
}

TEST(Graph, DoubleEdge) {
  const MultiGraph g({Permutation::from_cycles(2, {{1, 2}})});
  EXPECT_EQ(g.adjacency(), (std::vector<std::vector<int>>{{0, 2}, {2, 0}}));
  const auto cyc = enumerate_cycles(g, 4);
  ASSERT_EQ(cyc.size(), 1u);
  EXPECT_EQ(cyc[0].word, Word::parse("p1.p1"));
  EXPECT_EQ(cnbw_count(g, 2), 4u);
}

TEST(Graph, DartsAndRowSums) {
  const auto g = random_graph(3, 50, 1);
  for (Dart e = 0; e < g.dart_count(); ++e) {
    EXPECT_EQ(g.reversal(g.reversal(e)), e);
    EXPECT_NE(g.reversal(e), e);
    EXPECT_EQ(g.tail(g.reversal(e)), g.head(e));
  }
  for (const auto& row : g.adjacency()) {
    int s = 0;
    for (int v : row) s += v;
    EXPECT_EQ(s, 6);
  }
}

TEST(Cycles, MatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int d = 1 + static_cast<int>(seed % 3);
    const std::size_t n = 3 + seed % 10;
    const auto g = random_graph(d, n, seed + 100);
    for (std::size_t K = 1; K <= 6; ++K) {
      const auto brute = brute_cycles(g, K);
      const auto counts = cycle_counts(g, K);
      for (std::size_t k = 1; k <= K; ++k) {
        const std::size_t b = brute.count(k) ? brute.at(k) : 0;
        ASSERT_EQ(counts[k], b) << "seed " << seed << " K " << K << " k " << k;
      }
    }
  }
}

TEST(Cycles, RelabelInvariant) {
  const auto g = random_graph(2, 12, 7);
  Rng r(8);
  PermutationTower relabel;
  relabel.grow(12, r);
  const Permutation& q = relabel.top();
  std::vector<Permutation> conj;
  for (const auto& p : g.perms()) {
    std::vector<Label> m(12);
    for (Label x = 0; x < 12; ++x) m[q(x)] = q(p(x));
    conj.push_back(Permutation::from_map(m));
  }
  const MultiGraph h(conj);
  std::multiset<Word> a, b;
  for (const auto& c : enumerate_cycles(g, 6)) a.insert(c.word);
  for (const auto& c : enumerate_cycles(h, 6)) b.insert(c.word);
  EXPECT_EQ(a, b);
}

TEST(Cycles, ThroughVertexConsistent) {
  const auto g = random_graph(2, 30, 9);
  const auto all = enumerate_cycles(g, 5);
  for (Label x = 0; x < 30; ++x) {
    std::size_t expect = 0;
    for (const auto& c : all) expect += std::count(c.vertices.begin(), c.vertices.end(), x);
    std::size_t got = 0;
    for_each_cycle_through(g, 5, x, [&](const std::vector<Dart>&) { ++got; });
    EXPECT_EQ(got, expect);
  }
}

TEST(Cycles, CnbwMatchesDenseTrace) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const int d = 1 + static_cast<int>(seed % 3);
    const auto g = random_graph(d, 9, seed);
    const std::size_t D = g.dart_count();
    std::vector<std::vector<std::uint64_t>> B(D, std::vector<std::uint64_t>(D, 0)), P = B;
    for (Dart e = 0; e < D; ++e) {
      P[e][e] = 1;
      for (Dart f = 0; f < D; ++f) B[e][f] = (g.head(e) == g.tail(f) && f != g.reversal(e));
    }
    const auto fast = cnbw_counts(g, 7);
    for (std::size_t k = 1; k <= 7; ++k) {
      std::vector<std::vector<std::uint64_t>> Q(D, std::vector<std::uint64_t>(D, 0));
      for (Dart a = 0; a < D; ++a)
        for (Dart b = 0; b < D; ++b)
          if (P[a][b])
            for (Dart c = 0; c < D; ++c) Q[a][c] += P[a][b] * B[b][c];
      P = Q;
      std::uint64_t tr = 0;
      for (Dart a = 0; a < D; ++a) tr += P[a][a];
      EXPECT_EQ(fast[k], tr) << seed << " " << k;
    }
  }
}

TEST(Cycles, CnbwOnTangleFreeGraphs) {
  // Random d = 2 graphs of desk size are rarely (k, k) tangle-free beyond k = 2;
  // d = 1 graphs are disjoint cycles and always are.
  int checked = 0;
  for (auto [d, n, kk] : {std::tuple{1, 300, 6}, std::tuple{2, 400, 2}}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto g = random_graph(d, static_cast<std::size_t>(n), seed);
      const auto K = static_cast<std::size_t>(kk);
      if (!is_tangle_free(g, K, K)) continue;
      ++checked;
      const auto c = cycle_counts(g, K);
      const auto w = cnbw_counts(g, K);
      for (std::size_t k = 1; k <= K; ++k) {
        std::uint64_t s = 0;
        for (std::size_t j = 1; j <= k; ++j)
          if (k % j == 0) s += 2 * j * c[j];
        EXPECT_EQ(w[k], s);
      }
    }
  }
  EXPECT_GT(checked, 45);
}

TEST(Cycles, TangleFree) {
  const MultiGraph one({Permutation::from_cycles(3, {{1, 2, 3}})});
  EXPECT_TRUE(is_tangle_free(one, 5, 5));
  const MultiGraph two_loops({Permutation::identity(1), Permutation::identity(1)});
  EXPECT_FALSE(is_tangle_free(two_loops, 1, 1));
  // Two loops at vertices 1 and 3 of a path 1-2-3: distance 2.
  const MultiGraph path({Permutation::from_cycles(3, {{1, 2}}), Permutation::from_cycles(3, {{2, 3}})});
  // cycles of length <= 2: loop at 3 (pi1), loop at 1 (pi2), double edges {1,2} and {2,3}
  EXPECT_FALSE(is_tangle_free(path, 2, 1));
  EXPECT_TRUE(is_tangle_free(path, 1, 2));
  EXPECT_FALSE(is_tangle_free(path, 1, 3));
}

TEST(Precycles, SignMismatch) {
  const MultiGraph g({Permutation::identity(3), Permutation::identity(3)});
  const auto u = Word::parse_sequence("p1.P2");
  EXPECT_THROW(precycle_count(g, u), SignMismatch);
}

TEST(Precycles, IdentityHasNone) {
  const MultiGraph g({Permutation::identity(5)});
  const auto u = Word::parse_sequence("p1");
  EXPECT_EQ(precycle_count(g, u), 0u);
}

TEST(Precycles, BoundsAndBirthRate) {
  const std::size_t n = 2000;
  double acc = 0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    const auto g = random_graph(2, n, 500 + rep);
    std::set<Label> short_vertices;
    for (const auto& c : enumerate_cycles(g, 4)) short_vertices.insert(c.vertices.begin(), c.vertices.end());
    const Word w = Word::parse("p1.p2");
    std::size_t total = 0;
    for (const auto& u : orbit(w)) {
      if (code_sign(u.front()) != code_sign(u.back())) continue;
      const auto s = precycle_count(g, u);
      EXPECT_LE(s, n);
      EXPECT_GE(static_cast<double>(s), static_cast<double>(n) - 2.0 * 4 * 64 * short_vertices.size());
      total += s;
    }
    acc += static_cast<double>(total) / static_cast<double>(n);
  }
  // 2b/h sign-compatible sequences in the orbit, about n pre-cycles each
  const auto st = word_stats(Word::parse("p1.p2"));
  EXPECT_NEAR(acc / reps, 2.0 * st.b / st.h, 0.04);
}
