#pragma once

// Dart-based multigraphs from d permutations: cycles and their words, closed
// non-backtracking walk counts, tangle-freeness and pre-cycles.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "rrg/tower.hpp"
#include "rrg/words.hpp"

namespace rrg {

struct SignMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using Dart = std::uint32_t;

/// Out-darts of vertex x are (x, i, +) -> pi_i(x) and (x, i, -) -> pi_i^{-1}(x),
/// with id (x*d + i)*2 + (sign < 0). A dart's letter code equals 2i + (sign < 0).
class MultiGraph {
 public:
  MultiGraph() = default;
  explicit MultiGraph(std::vector<Permutation> perms) : perms_(std::move(perms)) {
    if (perms_.empty()) throw std::invalid_argument("MultiGraph needs d >= 1 permutations");
    n_ = perms_.front().size();
    for (const auto& p : perms_) {
      if (p.size() != n_) throw std::invalid_argument("permutations differ in size");
    }
    if (static_cast<int>(perms_.size()) > kMaxGenerators) throw std::invalid_argument("too many generators");
  }

  std::size_t n() const { return n_; }
  int d() const { return static_cast<int>(perms_.size()); }
  std::size_t dart_count() const { return n_ * perms_.size() * 2; }
  std::size_t out_degree() const { return perms_.size() * 2; }
  const Permutation& perm(int i) const { return perms_[static_cast<std::size_t>(i)]; }
  const std::vector<Permutation>& perms() const { return perms_; }

  Dart dart(Label x, LetterCode code) const { return static_cast<Dart>(x * out_degree() + code); }
  Label tail(Dart e) const { return static_cast<Label>(e / out_degree()); }
  LetterCode code(Dart e) const { return static_cast<LetterCode>(e % out_degree()); }
  Label head(Dart e) const { return apply(code(e), tail(e)); }
  Dart reversal(Dart e) const { return dart(head(e), inverse_code(code(e))); }

  /// Image of x under the letter.
  Label apply(LetterCode c, Label x) const {
    const auto& p = perms_[c >> 1];
    return (c & 1) ? p.inverse(x) : p(x);
  }

  /// Removes the largest vertex from every permutation (one step down the towers).
  void pop_top() {
    if (n_ == 0) throw std::out_of_range("pop_top on empty graph");
    for (auto& p : perms_) p.pop_top();
    --n_;
  }

  /// Left-multiplies every permutation by the transposition (a b).
  void left_transpose(Label a, Label b) {
    for (auto& p : perms_) p.left_transpose(a, b);
  }

  /// Dense adjacency: A[x][y] = number of darts x -> y (a loop contributes 2 on the diagonal).
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> a(n_, std::vector<int>(n_, 0));
    for (Dart e = 0; e < dart_count(); ++e) ++a[tail(e)][head(e)];
    return a;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Permutation> perms_;
};

inline MultiGraph build_graph(std::vector<Permutation> perms) { return MultiGraph(std::move(perms)); }

struct CycleRecord {
  std::vector<Label> vertices;
  std::vector<Dart> darts;
  Word word;
  std::size_t length() const { return darts.size(); }
};

namespace detail {

template <typename F>
void cycle_dfs(const MultiGraph& g, std::size_t K, Label start, bool min_start, std::vector<Dart>& path,
               std::vector<char>& on_path, F& f) {
  const Dart last = path.back();
  const Label v = g.head(last);
  const Dart back = g.reversal(last);
  const std::size_t k = path.size();
  if (v == start) {
    const Dart first = path.front();
    // Orientation dedup; for a loop the reversal is the other dart of the pair.
    if (first != back && first < g.reversal(last)) f(std::as_const(path));
    return;
  }
  if (k == K) return;
  if (on_path[v] || (min_start && v < start)) return;
  on_path[v] = 1;
  for (std::size_t c = 0; c < g.out_degree(); ++c) {
    const Dart e = g.dart(v, static_cast<LetterCode>(c));
    if (e == back) continue;
    path.push_back(e);
    cycle_dfs(g, K, start, min_start, path, on_path, f);
    path.pop_back();
  }
  on_path[v] = 0;
}

}  // namespace detail

/// Calls f(darts) once per cycle of length <= K. Cycles start at their minimum
/// vertex and each is reported in one orientation.
template <typename F>
void for_each_cycle(const MultiGraph& g, std::size_t K, F&& f) {
  std::vector<char> on_path(g.n(), 0);
  std::vector<Dart> path;
  path.reserve(K + 1);
  for (Label x = 0; x < g.n(); ++x) {
    on_path[x] = 1;
    for (std::size_t c = 0; c < g.out_degree(); ++c) {
      path.assign(1, g.dart(x, static_cast<LetterCode>(c)));
      detail::cycle_dfs(g, K, x, true, path, on_path, f);
    }
    on_path[x] = 0;
  }
}

/// Calls f(darts) once per cycle of length <= K through vertex x, starting at x.
template <typename F>
void for_each_cycle_through(const MultiGraph& g, std::size_t K, Label x, F&& f) {
  std::vector<char> on_path(g.n(), 0);
  std::vector<Dart> path;
  path.reserve(K + 1);
  on_path[x] = 1;
  for (std::size_t c = 0; c < g.out_degree(); ++c) {
    path.assign(1, g.dart(x, static_cast<LetterCode>(c)));
    detail::cycle_dfs(g, K, x, false, path, on_path, f);
  }
}

/// Calls f(darts) once per cycle of length <= K meeting the vertex set S. Each
/// cycle starts at the first vertex of S (in list order) that it contains.
template <typename F>
void for_each_cycle_meeting(const MultiGraph& g, std::size_t K, std::vector<Label> S, F&& f) {
  std::vector<Label> uniq;
  for (Label x : S) {
    if (std::find(uniq.begin(), uniq.end(), x) == uniq.end()) uniq.push_back(x);
  }
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    for_each_cycle_through(g, K, uniq[i], [&](const std::vector<Dart>& darts) {
      for (Dart e : darts) {
        const Label v = g.tail(e);
        for (std::size_t j = 0; j < i; ++j) {
          if (uniq[j] == v) return;
        }
      }
      f(darts);
    });
  }
}

inline std::vector<LetterCode> dart_codes(const MultiGraph& g, const std::vector<Dart>& darts) {
  std::vector<LetterCode> w(darts.size());
  for (std::size_t i = 0; i < darts.size(); ++i) w[i] = g.code(darts[i]);
  return w;
}

inline std::vector<CycleRecord> enumerate_cycles(const MultiGraph& g, std::size_t K) {
  std::vector<CycleRecord> out;
  for_each_cycle(g, K, [&](const std::vector<Dart>& darts) {
    CycleRecord r;
    r.darts = darts;
    for (Dart e : darts) r.vertices.push_back(g.tail(e));
    r.word = Word::from_codes(dart_codes(g, darts));
    out.push_back(std::move(r));
  });
  return out;
}

/// C_k for k = 0..K (index 0 unused).
inline std::vector<std::uint64_t> cycle_counts(const MultiGraph& g, std::size_t K) {
  std::vector<std::uint64_t> c(K + 1, 0);
  for_each_cycle(g, K, [&](const std::vector<Dart>& darts) { ++c[darts.size()]; });
  return c;
}

/// tr(B^k) for k = 1..kmax (index 0 holds the dart count), by meeting in the middle:
/// (B^b)[f, e] = (B^b)[rev e, rev f], so both halves are forward walks.
inline std::vector<std::uint64_t> cnbw_counts(const MultiGraph& g, std::size_t kmax) {
  const std::size_t D = g.dart_count();
  const std::size_t half = (kmax + 1) / 2;
  std::vector<std::uint64_t> out(kmax + 1, 0);
  out[0] = D;
  std::vector<std::uint64_t> dense(D, 0);

  struct Layer {
    std::vector<Dart> idx;
    std::vector<std::uint64_t> val;
  };
  auto walk = [&](Dart start, std::vector<Layer>& layers) {
    layers.assign(half + 1, Layer{});
    layers[0].idx = {start};
    layers[0].val = {1};
    for (std::size_t step = 1; step <= half; ++step) {
      const Layer& prev = layers[step - 1];
      Layer& cur = layers[step];
      for (std::size_t a = 0; a < prev.idx.size(); ++a) {
        const Dart e = prev.idx[a];
        const Dart back = g.reversal(e);
        const Label v = g.head(e);
        for (std::size_t c = 0; c < g.out_degree(); ++c) {
          const Dart f = g.dart(v, static_cast<LetterCode>(c));
          if (f == back) continue;
          if (dense[f] == 0) cur.idx.push_back(f);
          dense[f] += prev.val[a];
        }
      }
      cur.val.resize(cur.idx.size());
      for (std::size_t a = 0; a < cur.idx.size(); ++a) {
        cur.val[a] = dense[cur.idx[a]];
        dense[cur.idx[a]] = 0;
      }
    }
  };

  std::vector<Layer> fwd, bwd;
  for (Dart e = 0; e < D; ++e) {
    walk(e, fwd);
    walk(g.reversal(e), bwd);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const std::size_t a = k / 2;
      const std::size_t b = k - a;
      const Layer& la = fwd[a];
      const Layer& lb = bwd[b];
      for (std::size_t i = 0; i < lb.idx.size(); ++i) dense[g.reversal(lb.idx[i])] = lb.val[i];
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < la.idx.size(); ++i) s += la.val[i] * dense[la.idx[i]];
      for (std::size_t i = 0; i < lb.idx.size(); ++i) dense[g.reversal(lb.idx[i])] = 0;
      out[k] += s;
    }
  }
  return out;
}

inline std::uint64_t cnbw_count(const MultiGraph& g, std::size_t k) { return cnbw_counts(g, k)[k]; }

/// Undirected neighbours of x (with repetition for multi-edges).
inline void neighbours(const MultiGraph& g, Label x, std::vector<Label>& out) {
  out.clear();
  for (std::size_t c = 0; c < g.out_degree(); ++c) out.push_back(g.apply(static_cast<LetterCode>(c), x));
}

/// True iff any two distinct cycles of length <= l are at graph distance >= j.
inline bool is_tangle_free(const MultiGraph& g, std::size_t l, std::size_t j) {
  const auto cycles = enumerate_cycles(g, l);
  if (cycles.size() < 2) return true;
  std::vector<std::vector<std::uint32_t>> owners(g.n());
  for (std::uint32_t c = 0; c < cycles.size(); ++c) {
    for (Label v : cycles[c].vertices) owners[v].push_back(c);
  }
  std::vector<int> dist(g.n(), -1);
  std::vector<Label> touched, nb;
  for (std::uint32_t c = 0; c < cycles.size(); ++c) {
    std::deque<Label> q;
    for (Label v : cycles[c].vertices) {
      if (dist[v] < 0) {
        dist[v] = 0;
        touched.push_back(v);
        q.push_back(v);
      }
    }
    bool tangled = false;
    while (!q.empty() && !tangled) {
      const Label v = q.front();
      q.pop_front();
      for (std::uint32_t o : owners[v]) {
        if (o != c) tangled = true;
      }
      if (tangled || dist[v] + 1 >= static_cast<int>(j)) continue;
      neighbours(g, v, nb);
      for (Label y : nb) {
        if (dist[y] < 0) {
          dist[y] = dist[v] + 1;
          touched.push_back(y);
          q.push_back(y);
        }
      }
    }
    for (Label v : touched) dist[v] = -1;
    touched.clear();
    if (tangled) return false;
  }
  return true;
}

/// Number of start vertices x such that following the letter sequence u from x
/// visits k+1 distinct vertices (a non-closed trail that [s_0, s_k] closes).
inline std::size_t precycle_count(const MultiGraph& g, std::span<const LetterCode> u) {
  if (u.empty()) throw std::invalid_argument("empty word");
  if (code_sign(u.front()) != code_sign(u.back())) throw SignMismatch("first and last letters differ in sign");
  for (LetterCode c : u) {
    if (code_generator(c) > g.d()) throw std::invalid_argument("letter generator exceeds d");
  }
  std::size_t count = 0;
  std::vector<Label> trail(u.size() + 1);
  for (Label x = 0; x < g.n(); ++x) {
    trail[0] = x;
    bool ok = true;
    for (std::size_t i = 0; i < u.size() && ok; ++i) {
      trail[i + 1] = g.apply(u[i], trail[i]);
      for (std::size_t j = 0; j <= i && ok; ++j) ok = trail[j] != trail[i + 1];
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace rrg
