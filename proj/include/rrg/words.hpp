#pragma once

// Cyclically reduced words over {pi_1^{+-1}, ..., pi_d^{+-1}} modulo rotation and
// inversion, with their statistics and the doubling/halving operations.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rrg {

struct NotCyclicallyReduced : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Letters are packed as code = 2*(generator-1) + (sign < 0), which gives the
/// order pi_1 < pi_1^{-1} < pi_2 < pi_2^{-1} < ...
using LetterCode = std::uint8_t;

inline constexpr int kMaxGenerators = 127;

struct Letter {
  int generator = 1;  // 1..d
  int sign = 1;       // +1 or -1

  friend constexpr bool operator==(const Letter&, const Letter&) = default;

  constexpr Letter inverse() const { return {generator, -sign}; }
  constexpr LetterCode code() const {
    return static_cast<LetterCode>(2 * (generator - 1) + (sign < 0 ? 1 : 0));
  }
  static constexpr Letter from_code(LetterCode c) { return {c / 2 + 1, (c & 1) ? -1 : 1}; }
};

constexpr LetterCode inverse_code(LetterCode c) { return static_cast<LetterCode>(c ^ 1u); }
constexpr int code_sign(LetterCode c) { return (c & 1) ? -1 : 1; }
constexpr int code_generator(LetterCode c) { return c / 2 + 1; }

inline bool is_cyclically_reduced(std::span<const LetterCode> w) {
  const std::size_t k = w.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (w[(i + 1) % k] == inverse_code(w[i])) return false;
  }
  return true;
}

/// Lexicographic minimum over all rotations of w and of its inverse.
inline std::vector<LetterCode> canonical_codes(std::span<const LetterCode> w) {
  const std::size_t k = w.size();
  std::vector<LetterCode> inv(k);
  for (std::size_t i = 0; i < k; ++i) inv[i] = inverse_code(w[k - 1 - i]);

  const LetterCode* best_base = w.data();
  std::size_t best_shift = 0;
  auto less_rot = [k](const LetterCode* a, std::size_t sa, const LetterCode* b, std::size_t sb) {
    for (std::size_t i = 0; i < k; ++i) {
      const LetterCode x = a[(sa + i) % k];
      const LetterCode y = b[(sb + i) % k];
      if (x != y) return x < y;
    }
    return false;
  };
  for (const LetterCode* base : {w.data(), static_cast<const LetterCode*>(inv.data())}) {
    for (std::size_t s = 0; s < k; ++s) {
      if (less_rot(base, s, best_base, best_shift)) {
        best_base = base;
        best_shift = s;
      }
    }
  }
  std::vector<LetterCode> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = best_base[(best_shift + i) % k];
  return out;
}

inline bool is_canonical(std::span<const LetterCode> w) {
  const auto c = canonical_codes(w);
  return std::equal(c.begin(), c.end(), w.begin(), w.end());
}

/// Canonical representative of a class in W_k / D_{2k}.
class Word {
 public:
  Word() = default;

  /// Canonicalizes an arbitrary cyclically reduced letter sequence.
  static Word canonical(std::span<const Letter> letters) {
    std::vector<LetterCode> codes;
    codes.reserve(letters.size());
    for (const Letter& l : letters) {
      if (l.generator < 1 || l.generator > kMaxGenerators || (l.sign != 1 && l.sign != -1)) {
        throw std::invalid_argument("letter out of range");
      }
      codes.push_back(l.code());
    }
    return from_codes(codes);
  }

  static Word from_codes(std::span<const LetterCode> codes) {
    if (codes.empty()) throw std::invalid_argument("empty word");
    if (!is_cyclically_reduced(codes)) {
      throw NotCyclicallyReduced("word contains a letter followed by its inverse");
    }
    Word w;
    w.codes_ = canonical_codes(codes);
    return w;
  }

  /// Parses renderings like "p2.P1.p2" (lowercase: sign +1, uppercase: inverse).
  static Word parse(std::string_view text) { return from_codes(parse_sequence(text)); }

  /// Parses a concrete (non-canonicalized) letter sequence.
  static std::vector<LetterCode> parse_sequence(std::string_view text) {
    std::vector<LetterCode> codes;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t dot = text.find('.', pos);
      const std::string_view tok = text.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
      if (tok.size() < 2 || (tok[0] != 'p' && tok[0] != 'P')) {
        throw std::invalid_argument("bad letter token: " + std::string(tok));
      }
      const int g = std::stoi(std::string(tok.substr(1)));
      if (g < 1 || g > kMaxGenerators) throw std::invalid_argument("generator out of range");
      codes.push_back(Letter{g, tok[0] == 'p' ? 1 : -1}.code());
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
    return codes;
  }

  const std::vector<LetterCode>& codes() const { return codes_; }
  std::size_t length() const { return codes_.size(); }
  Letter letter(std::size_t i) const { return Letter::from_code(codes_[i]); }

  std::string text() const { return render(codes_); }

  static std::string render(std::span<const LetterCode> codes) {
    std::string out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (i) out += '.';
      out += code_sign(codes[i]) > 0 ? 'p' : 'P';
      out += std::to_string(code_generator(codes[i]));
    }
    return out;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.length() != b.length()) return a.length() <=> b.length();
    return a.codes_ <=> b.codes_;
  }

 private:
  std::vector<LetterCode> codes_;
};

struct WordStats {
  int length = 0;
  int h = 0;  // largest m with w = u^m
  int b = 0;  // cyclic count of letters whose sign repeats the previous letter's sign
  int c = 0;  // cyclic count of i with w_i = w_{i+1}

  friend bool operator==(const WordStats&, const WordStats&) = default;
};

inline WordStats word_stats(std::span<const LetterCode> w) {
  const int k = static_cast<int>(w.size());
  WordStats s;
  s.length = k;
  for (int p = 1; p <= k; ++p) {
    if (k % p != 0) continue;
    bool periodic = true;
    for (int i = 0; i + p < k && periodic; ++i) periodic = w[i] == w[i + p];
    if (periodic) {
      s.h = k / p;
      break;
    }
  }
  for (int i = 0; i < k; ++i) {
    const LetterCode prev = w[(i + k - 1) % k];
    if (code_sign(prev) == code_sign(w[i])) ++s.b;
    if (w[i] == w[(i + 1) % k]) ++s.c;
  }
  return s;
}

inline WordStats word_stats(const Word& w) { return word_stats(w.codes()); }

/// Number of distinct sequences in the rotation+inversion orbit.
inline int orbit_size(const Word& w) { return 2 * static_cast<int>(w.length()) / word_stats(w).h; }

/// All distinct letter sequences in the orbit of w, by explicit generation.
inline std::vector<std::vector<LetterCode>> orbit(const Word& w) {
  const auto& c = w.codes();
  const std::size_t k = c.size();
  std::vector<std::vector<LetterCode>> out;
  std::vector<LetterCode> inv(k);
  for (std::size_t i = 0; i < k; ++i) inv[i] = inverse_code(c[k - 1 - i]);
  for (const std::vector<LetterCode>* base : {&c, static_cast<const std::vector<LetterCode>*>(&inv)}) {
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<LetterCode> r(k);
      for (std::size_t i = 0; i < k; ++i) r[i] = (*base)[(s + i) % k];
      out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Number of cyclically reduced words of length k on d generators:
/// (2d-1)^k - 1 + 2d for even k, (2d-1)^k + 1 for odd k.
inline std::uint64_t a_count(int d, int k) {
  if (d < 1 || k < 1) throw std::invalid_argument("a_count requires d >= 1, k >= 1");
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(d) - 1;
  std::uint64_t p = 1;
  for (int i = 0; i < k; ++i) {
    if (__builtin_mul_overflow(p, base, &p)) throw std::overflow_error("a_count overflows 64 bits");
  }
  std::uint64_t out = 0;
  const std::uint64_t extra = (k % 2 == 0) ? 2 * static_cast<std::uint64_t>(d) - 1 : 1;
  if (__builtin_add_overflow(p, extra, &out)) throw std::overflow_error("a_count overflows 64 bits");
  return out;
}

/// Enumeration is refused when the number of cyclically reduced sequences exceeds this.
inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 26;

/// One canonical representative per class of W_k / D_{2k}, in lexicographic order.
inline std::vector<Word> enumerate_classes(int d, int k) {
  if (d < 1 || d > kMaxGenerators || k < 1) throw std::invalid_argument("enumerate_classes: bad (d, k)");
  std::uint64_t total = 0;
  try {
    total = a_count(d, k);
  } catch (const std::overflow_error&) {
    throw BudgetExceeded("enumeration budget exceeded");
  }
  if (total > kEnumerationBudget) throw BudgetExceeded("enumeration budget exceeded");

  const int letters = 2 * d;
  std::vector<Word> out;
  std::vector<LetterCode> seq(static_cast<std::size_t>(k));
  // A canonical sequence starts with a letter that is <= every letter and every inverse in it.
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      if (seq[0] == inverse_code(seq[static_cast<std::size_t>(k - 1)])) return;
      if (!is_canonical(seq)) return;
      out.push_back(Word::from_codes(seq));
      return;
    }
    for (int c = 0; c < letters; ++c) {
      const auto code = static_cast<LetterCode>(c);
      if (pos > 0) {
        if (code < seq[0] || inverse_code(code) < seq[0]) continue;
        if (code == inverse_code(seq[static_cast<std::size_t>(pos - 1)])) continue;
      }
      seq[static_cast<std::size_t>(pos)] = code;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Doubles the i-th letter (1-based): w_1..w_i w_i w_{i+1}..w_k.
inline Word double_letter(const Word& w, std::size_t i) {
  if (i < 1 || i > w.length()) throw std::out_of_range("double_letter position");
  std::vector<LetterCode> c = w.codes();
  c.insert(c.begin() + static_cast<std::ptrdiff_t>(i), c[i - 1]);
  return Word::from_codes(c);
}

struct Halving {
  std::size_t position = 0;    // i (1-based) with w_i = w_{i+1}, cyclically
  std::optional<Word> result;  // nullopt: the chain dies (length-1 words)
};

/// One entry per cyclic double-letter pair of w.
inline std::vector<Halving> halvings(const Word& w) {
  const auto& c = w.codes();
  const std::size_t k = c.size();
  std::vector<Halving> out;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t next = (i + 1) % k;
    if (c[i] != c[next]) continue;
    Halving h;
    h.position = i + 1;
    if (k > 1) {
      std::vector<LetterCode> r = c;
      r.erase(r.begin() + static_cast<std::ptrdiff_t>(next));
      h.result = Word::from_codes(r);
    }
    out.push_back(std::move(h));
  }
  return out;
}

/// All classes of length <= K with cached statistics and the halving/doubling
/// transition structure between them. Class ids are ordered by (length, word).
class WordClassTable {
 public:
  struct Transition {
    std::uint32_t target;
    int multiplicity;
  };

  WordClassTable(int d, int K) : d_(d), K_(K) {
    if (d < 1 || d > kMaxGenerators || K < 1) throw std::invalid_argument("WordClassTable: bad (d, K)");
    offsets_.push_back(0);
    offsets_.push_back(0);
    for (int k = 1; k <= K; ++k) {
      for (Word& w : enumerate_classes(d, k)) {
        index_.emplace(key(w.codes()), static_cast<std::uint32_t>(words_.size()));
        stats_.push_back(word_stats(w));
        words_.push_back(std::move(w));
      }
      offsets_.push_back(words_.size());
    }
    halving_.resize(words_.size());
    death_rate_.resize(words_.size(), 0.0);
    doubling_.resize(words_.size());
    for (std::uint32_t id = 0; id < words_.size(); ++id) {
      const Word& w = words_[id];
      const WordStats& st = stats_[id];
      death_rate_[id] = st.length - st.c;
      for (const Halving& h : halvings(w)) {
        if (!h.result) {
          death_rate_[id] += 1.0;
        } else {
          add(halving_[id], *find(h.result->codes()));
        }
      }
      if (st.length < K) {
        for (std::size_t i = 1; i <= w.length(); ++i) add(doubling_[id], *find(double_letter(w, i).codes()));
      }
    }
  }

  int d() const { return d_; }
  int max_len() const { return K_; }
  std::size_t size() const { return words_.size(); }
  const Word& word(std::uint32_t id) const { return words_[id]; }
  const WordStats& stats(std::uint32_t id) const { return stats_[id]; }
  const std::vector<Word>& words() const { return words_; }

  /// Ids of the classes of length k form the range [begin(k), end(k)).
  std::uint32_t begin(int k) const { return static_cast<std::uint32_t>(offsets_[static_cast<std::size_t>(k)]); }
  std::uint32_t end(int k) const { return static_cast<std::uint32_t>(offsets_[static_cast<std::size_t>(k) + 1]); }

  /// Id of the class of an arbitrary cyclically reduced sequence, if it is short enough.
  std::optional<std::uint32_t> find(std::span<const LetterCode> codes) const {
    if (codes.empty() || static_cast<int>(codes.size()) > K_) return std::nullopt;
    const auto it = index_.find(key(canonical_codes(codes)));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint32_t> find(const Word& w) const { return find(w.codes()); }

  /// Halving targets with multiplicities (the jump rates).
  const std::vector<Transition>& halving(std::uint32_t id) const { return halving_[id]; }
  /// Rate of jumping to the cemetery: |w| - c(w), plus 1 for length-1 words.
  double death_rate(std::uint32_t id) const { return death_rate_[id]; }
  /// Doubling targets with multiplicities; empty at the maximal length.
  const std::vector<Transition>& doubling(std::uint32_t id) const { return doubling_[id]; }

 private:
  static std::string key(std::span<const LetterCode> codes) { return std::string(codes.begin(), codes.end()); }
  static void add(std::vector<Transition>& v, std::uint32_t target) {
    for (auto& t : v) {
      if (t.target == target) {
        ++t.multiplicity;
        return;
      }
    }
    v.push_back({target, 1});
  }

  int d_;
  int K_;
  std::vector<Word> words_;
  std::vector<WordStats> stats_;
  std::vector<std::size_t> offsets_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<Transition>> halving_;
  std::vector<double> death_rate_;
  std::vector<std::vector<Transition>> doubling_;
};

}  // namespace rrg
