#pragma once

// Permutations, Chinese Restaurant Process towers and the Poissonized
// dimension clock. Labels are 0-based internally; text forms are 1-based.

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrg/rng.hpp"

namespace rrg {

using Label = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::size_t n) : map_(n), inv_(n) {
    for (std::size_t i = 0; i < n; ++i) map_[i] = inv_[i] = static_cast<Label>(i);
  }

  static Permutation identity(std::size_t n) { return Permutation(n); }

  /// From a 0-based image vector.
  static Permutation from_map(std::vector<Label> map) {
    Permutation p;
    p.inv_.assign(map.size(), 0);
    std::vector<char> seen(map.size(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] >= map.size() || seen[map[i]]) throw std::invalid_argument("not a bijection");
      seen[map[i]] = 1;
      p.inv_[map[i]] = static_cast<Label>(i);
    }
    p.map_ = std::move(map);
    return p;
  }

  /// From 1-based cycles, e.g. from_cycles(3, {{1, 3, 2}}).
  static Permutation from_cycles(std::size_t n, std::initializer_list<std::initializer_list<Label>> cycles) {
    std::vector<Label> map(n);
    for (std::size_t i = 0; i < n; ++i) map[i] = static_cast<Label>(i);
    for (const auto& cyc : cycles) {
      std::vector<Label> c(cyc);
      for (std::size_t i = 0; i < c.size(); ++i) map[c[i] - 1] = c[(i + 1) % c.size()] - 1;
    }
    return from_map(std::move(map));
  }

  std::size_t size() const { return map_.size(); }
  Label operator()(Label x) const { return map_[x]; }
  Label inverse(Label x) const { return inv_[x]; }
  const std::vector<Label>& map() const { return map_; }
  const std::vector<Label>& inverse_map() const { return inv_; }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.map_ == b.map_; }

  /// (a * b)(x) = a(b(x)).
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
    std::vector<Label> m(a.size());
    for (std::size_t x = 0; x < m.size(); ++x) m[x] = a.map_[b.map_[x]];
    return from_map(std::move(m));
  }

  /// 1-based cycle notation including fixed points, e.g. "(1 3 2)(4)".
  std::string cycle_string() const {
    std::string out;
    std::vector<char> seen(size(), 0);
    for (std::size_t s = 0; s < size(); ++s) {
      if (seen[s]) continue;
      out += '(';
      Label x = static_cast<Label>(s);
      bool first = true;
      while (!seen[x]) {
        seen[x] = 1;
        if (!first) out += ' ';
        out += std::to_string(x + 1);
        first = false;
        x = map_[x];
      }
      out += ')';
    }
    return out;
  }

  /// Number of cycles of each length: result[l] for l = 1..n.
  std::vector<std::size_t> cycle_type() const {
    std::vector<std::size_t> out(size() + 1, 0);
    std::vector<char> seen(size(), 0);
    for (std::size_t s = 0; s < size(); ++s) {
      if (seen[s]) continue;
      std::size_t len = 0;
      for (Label x = static_cast<Label>(s); !seen[x]; x = map_[x]) {
        seen[x] = 1;
        ++len;
      }
      ++out[len];
    }
    return out;
  }

  // In-place primitives used by the simulators.
  void set(Label x, Label y) {
    map_[x] = y;
    inv_[y] = x;
  }
  void push_fixed_point() {
    const auto n = static_cast<Label>(size());
    map_.push_back(n);
    inv_.push_back(n);
  }
  /// Removes the largest label, bypassing it in its cycle.
  void pop_top() {
    if (map_.empty()) throw std::out_of_range("pop_top on empty permutation");
    const auto top = static_cast<Label>(size() - 1);
    const Label pred = inv_[top];
    const Label succ = map_[top];
    if (pred != top) set(pred, succ);
    map_.pop_back();
    inv_.pop_back();
  }
  /// Left-multiplies by the transposition (a b): x -> tau(p(x)).
  void left_transpose(Label a, Label b) {
    const Label pa = inv_[a];
    const Label pb = inv_[b];
    map_[pa] = b;
    map_[pb] = a;
    inv_[a] = pb;
    inv_[b] = pa;
  }

 private:
  std::vector<Label> map_;
  std::vector<Label> inv_;
};

/// Inserts label n. choice == n makes it a fixed point; otherwise it goes right after `choice`.
inline void crp_insert_at(Permutation& p, Label choice) {
  const auto n = static_cast<Label>(p.size());
  if (choice > n) throw std::out_of_range("crp choice");
  p.push_fixed_point();
  if (choice == n) return;
  const Label succ = p(choice);
  p.set(choice, n);
  p.set(n, succ);
}

inline Permutation crp_insert(const Permutation& p, Rng& rng) {
  Permutation q = p;
  crp_insert_at(q, static_cast<Label>(rng.below(p.size() + 1)));
  return q;
}

/// Bypasses x in its cycle, then relabels the rest order-preservingly onto 0..n-2.
inline Permutation crp_delete(const Permutation& p, Label x) {
  const std::size_t n = p.size();
  if (x >= n) throw std::out_of_range("crp_delete label");
  std::vector<Label> m;
  m.reserve(n - 1);
  const Label pred = p.inverse(x);
  const Label succ = p(x);
  for (Label y = 0; y < n; ++y) {
    if (y == x) continue;
    Label img = (y == pred) ? succ : p(y);
    m.push_back(img > x ? img - 1 : img);
  }
  return Permutation::from_map(std::move(m));
}

/// A CRP tower stored as its top level plus the insertion log; level m is the
/// replay of the first m insertions.
class PermutationTower {
 public:
  PermutationTower() = default;

  std::size_t size() const { return top_.size(); }
  const Permutation& top() const { return top_; }
  const std::vector<Label>& choices() const { return choices_; }

  void grow(std::size_t n_target, Rng& rng) {
    while (top_.size() < n_target) push(static_cast<Label>(rng.below(top_.size() + 1)));
  }

  void push(Label choice) {
    crp_insert_at(top_, choice);
    choices_.push_back(choice);
  }

  Permutation level(std::size_t m) const {
    if (m > size()) throw std::out_of_range("tower level");
    if (m == size()) return top_;
    Permutation p;
    for (std::size_t i = 0; i < m; ++i) crp_insert_at(p, choices_[i]);
    return p;
  }

  static PermutationTower from_choices(const std::vector<Label>& choices) {
    PermutationTower t;
    for (Label c : choices) t.push(c);
    return t;
  }

  /// Version byte 0x01, varint n, then n varint choices.
  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out{kVersion};
    put_varint(out, choices_.size());
    for (Label c : choices_) put_varint(out, c);
    return out;
  }

  static PermutationTower deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.empty() || bytes[0] != kVersion) throw std::invalid_argument("tower log: bad version");
    std::size_t pos = 1;
    const std::uint64_t n = get_varint(bytes, pos);
    PermutationTower t;
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t c = get_varint(bytes, pos);
      if (c > i) throw std::invalid_argument("tower log: choice out of range");
      t.push(static_cast<Label>(c));
    }
    return t;
  }

 private:
  static constexpr std::uint8_t kVersion = 0x01;

  static void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
      out.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  static std::uint64_t get_varint(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos >= in.size()) throw std::invalid_argument("tower log: truncated");
      const std::uint8_t b = in[pos++];
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
    }
    throw std::invalid_argument("tower log: bad varint");
  }

  Permutation top_;
  std::vector<Label> choices_;
};

inline PermutationTower grow_tower(PermutationTower tower, std::size_t n_target, Rng& rng) {
  tower.grow(n_target, rng);
  return tower;
}

/// Jump i (1-based) happens after an Exp(i) gap; M_t counts jumps up to t.
struct DimensionClock {
  double horizon = 0.0;
  std::vector<double> jump_times;

  std::size_t M() const { return jump_times.size(); }
  std::size_t M_at(double t) const {
    std::size_t m = 0;
    while (m < jump_times.size() && jump_times[m] <= t) ++m;
    return m;
  }
};

inline DimensionClock sample_dimension(double t, Rng& rng) {
  if (t < 0) throw std::invalid_argument("sample_dimension: t < 0");
  DimensionClock c;
  c.horizon = t;
  double acc = 0.0;
  for (std::size_t i = 1;; ++i) {
    acc += rng.exponential(static_cast<double>(i));
    if (acc > t) break;
    c.jump_times.push_back(acc);
  }
  return c;
}

}  // namespace rrg
