#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qel/bits.hpp"
#include "qel/errors.hpp"
#include "qel/qcore.hpp"
#include "qel/rational.hpp"

namespace qel {

// ---------------------------------------------------------------------------
// Serialization format (bit-exact):
//
//   state   := header amplitude^(2^n)
//   header  := prefix(binary(n_qubits))                 minimal binary
//   amplitude := int(re.num) int(re.den) int(im.num) int(im.den)
//   int(v)  := sign_bit prefix(magnitude)
//
// where prefix(x) = 1^|x| 0 x. Magnitudes of numerators are written at the
// width of their denominator (left zero padded), denominators at their own
// minimal width. The padding makes the encoded length a function of the
// representation's precision rather than of the accidental sizes of the
// digits, so every state rationalized at the same precision has the same
// complexity K-hat. Denominators are positive, zero carries sign 0, and the
// stored num/den pair is encoded as given (no silent reduction), so the
// encoding is unique per state representation and the format is prefix-free.
// ---------------------------------------------------------------------------

namespace detail {

inline int numerator_width(const Rational& r) {
  const std::uint64_t mag =
      r.num < 0 ? ~static_cast<std::uint64_t>(r.num) + 1
                : static_cast<std::uint64_t>(r.num);
  return std::max(bit_length(mag),
                  bit_length(static_cast<std::uint64_t>(r.den)));
}

inline std::size_t rational_field_length(const Rational& r) {
  const int den_width = bit_length(static_cast<std::uint64_t>(r.den));
  return integer_field_length(numerator_width(r)) +
         integer_field_length(den_width);
}

inline void append_rational(BitString& out, const Rational& r) {
  append_integer_field(out, r.num, numerator_width(r));
  append_integer_field(out, r.den,
                       bit_length(static_cast<std::uint64_t>(r.den)));
}

inline Rational read_rational(BitReader& reader) {
  const std::int64_t num = read_integer_field(reader);
  const std::int64_t den = read_integer_field(reader);
  if (den < 1) throw ArgumentError("decode: denominator must be positive");
  return Rational(num, den);
}

}  // namespace detail

/// Encoded length of the canonical serialization, by pure arithmetic.
/// Must agree bit-for-bit with encode_elementary_state; a test pins that.
inline std::size_t elementary_encoding_length(
    int n_qubits, const std::vector<ComplexRational>& amps) {
  std::size_t len = prefix_encoded_length(binary_magnitude(
      static_cast<std::uint64_t>(n_qubits), bit_length(n_qubits)));
  for (const auto& a : amps) {
    len += detail::rational_field_length(a.re);
    len += detail::rational_field_length(a.im);
  }
  return len;
}

/// Pure state with exact rational amplitudes. The stored representation
/// (including unreduced denominators) is significant: it determines the
/// encoding and hence the complexity proxy.
class ElementaryState {
 public:
  ElementaryState(int n_qubits, std::vector<ComplexRational> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {
    if (n_qubits < 0 || n_qubits > 30) {
      throw ArgumentError("ElementaryState: qubit count out of range");
    }
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
      throw ArgumentError("ElementaryState: amplitude count is not 2^n");
    }
    double norm2 = 0.0;
    int max_den_bits = 1;
    for (const auto& a : amps_) {
      const double re = a.re.to_double();
      const double im = a.im.to_double();
      norm2 += re * re + im * im;
      max_den_bits = std::max(
          max_den_bits,
          std::max(bit_length(static_cast<std::uint64_t>(a.re.den)),
                   bit_length(static_cast<std::uint64_t>(a.im.den))));
    }
    norm_ = std::sqrt(norm2);
    precision_bits_ = max_den_bits - 1;
    // Rounding every real component to 2^-p moves the norm by at most
    // sqrt(2^{n+1}) * 2^{-p-1}; allow that window, floored for the trivial
    // precisions, and never accept a vector that is far from unit length.
    const double window =
        std::min(0.5, std::exp2(0.5 * (n_qubits + 1) + 1.0 - precision_bits_));
    if (std::abs(norm_ - 1.0) > window) {
      throw ArgumentError("ElementaryState: norm " + std::to_string(norm_) +
                          " outside the precision window");
    }
    needs_renorm_ = std::abs(norm_ - 1.0) > 1e-15;
    k_hat_ = elementary_encoding_length(n_qubits_, amps_);
  }

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return static_cast<std::int64_t>(amps_.size()); }
  const std::vector<ComplexRational>& amplitudes() const { return amps_; }
  double norm() const { return norm_; }
  bool needs_renorm() const { return needs_renorm_; }
  int precision_bits() const { return precision_bits_; }

  /// Complexity proxy: the canonical serialization length in bits.
  std::size_t k_hat() const { return k_hat_; }

  BitString encoding() const {
    BitString out = prefix_encode(binary_magnitude(
        static_cast<std::uint64_t>(n_qubits_), bit_length(n_qubits_)));
    for (const auto& a : amps_) {
      detail::append_rational(out, a.re);
      detail::append_rational(out, a.im);
    }
    return out;
  }

  /// Exactly-normalized real-valued version, used for all fidelity and
  /// overlap computations.
  PureState normalized() const {
    Vector v(dim());
    for (std::int64_t i = 0; i < dim(); ++i) {
      v(i) = Complex(amps_[i].re.to_double(), amps_[i].im.to_double());
    }
    return PureState::normalized(n_qubits_, std::move(v));
  }

  bool operator==(const ElementaryState& other) const {
    return n_qubits_ == other.n_qubits_ && amps_ == other.amps_;
  }

 private:
  int n_qubits_;
  std::vector<ComplexRational> amps_;
  double norm_ = 0.0;
  bool needs_renorm_ = false;
  int precision_bits_ = 0;
  std::size_t k_hat_ = 0;
};

inline BitString encode_elementary_state(const ElementaryState& psi) {
  return psi.encoding();
}

inline ElementaryState decode_elementary_state(BitReader& reader) {
  const std::uint64_t n = magnitude_value(prefix_decode(reader));
  if (n > 30) throw ArgumentError("decode: implausible qubit count");
  const std::size_t count = std::size_t{1} << n;
  std::vector<ComplexRational> amps;
  amps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ComplexRational a;
    a.re = detail::read_rational(reader);
    a.im = detail::read_rational(reader);
    amps.push_back(a);
  }
  return ElementaryState(static_cast<int>(n), std::move(amps));
}

inline ElementaryState decode_elementary_state(const BitString& bits) {
  BitReader reader(bits);
  ElementaryState s = decode_elementary_state(reader);
  if (!reader.at_end()) throw ArgumentError("decode: trailing bits");
  return s;
}

/// K-hat in bits. For elementary states this is the canonical serialization
/// length; for plain strings the prefix-code length 2|x|+1.
inline std::size_t proxy_complexity(const ElementaryState& psi) {
  return psi.k_hat();
}
inline std::size_t proxy_complexity(const BitString& x) {
  return prefix_encoded_length(x);
}

/// Alternative proxy for sensitivity runs: the byte-packed serialization
/// passed through DEFLATE, measured in bits. Same interface, different
/// length model; always deterministic for a fixed zlib version.
inline std::size_t compressed_complexity(const ElementaryState& psi) {
  const std::vector<std::uint8_t> raw = psi.encoding().pack_bytes();
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  const int rc = compress2(out.data(), &bound, raw.data(),
                           static_cast<uLong>(raw.size()), 9);
  if (rc != Z_OK) throw Error("compressed_complexity: zlib failure");
  return static_cast<std::size_t>(bound) * 8;
}

// ---------------------------------------------------------------------------
// Codebook: the candidate set for the pure-state complexity minimization.
// ---------------------------------------------------------------------------

struct Codebook {
  std::vector<ElementaryState> entries;  // sorted by (K-hat, encoding)
  std::string generation_rule;
  bool empty_budget_warning = false;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// Upper bound on the pure-state complexity of phi:
/// value = K-hat(witness) - log2 |<phi|witness>|^2, minimized over a
/// codebook. Ties resolve to the lower K-hat, then the lexicographically
/// smaller encoding.
struct ComplexityEstimate {
  double value = 0.0;
  double fidelity_term = 0.0;  // -log2 fidelity
  ElementaryState witness;
};

namespace detail {

struct MinTracker {
  bool found = false;
  double value = 0.0;
  std::size_t k_hat = 0;
  std::optional<ElementaryState> witness;
  std::optional<BitString> witness_encoding;  // filled lazily on ties
  double fidelity_term = 0.0;

  // Returns true when `candidate` improves on the current best under the
  // (value, K-hat, encoding) order.
  bool offer(const ElementaryState& candidate, double fidelity) {
    if (fidelity < 1e-15) return false;
    const double f_term = -std::log2(fidelity);
    const double v = static_cast<double>(candidate.k_hat()) + f_term;
    if (found) {
      if (v > value) return false;
      if (v == value) {
        if (candidate.k_hat() > k_hat) return false;
        if (candidate.k_hat() == k_hat) {
          if (!witness_encoding) witness_encoding = witness->encoding();
          if (!(candidate.encoding() < *witness_encoding)) return false;
        }
      }
    }
    found = true;
    value = v;
    k_hat = candidate.k_hat();
    fidelity_term = f_term;
    witness = candidate;
    witness_encoding.reset();
    return true;
  }

  ComplexityEstimate finish() const {
    if (!found) {
      throw NoWitnessError(
          "complexity bound: no candidate with nonzero fidelity");
    }
    return ComplexityEstimate{value, fidelity_term, *witness};
  }
};

}  // namespace detail

/// Def.-1 style minimization over an explicit codebook.
inline ComplexityEstimate complexity_upper_bound(const PureState& phi,
                                                 const Codebook& book) {
  if (book.empty()) throw ArgumentError("complexity_upper_bound: empty book");
  detail::MinTracker best;
  for (const auto& entry : book.entries) {
    if (entry.dim() != phi.dim()) continue;
    best.offer(entry, phi.fidelity(entry.normalized()));
  }
  return best.finish();
}

namespace detail {

inline void sort_and_dedupe(std::vector<ElementaryState>& entries) {
  std::vector<std::pair<BitString, std::size_t>> keyed;
  keyed.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    keyed.emplace_back(entries[i].encoding(), i);
  }
  std::sort(keyed.begin(), keyed.end(),
            [&](const auto& a, const auto& b) {
              const std::size_t ka = entries[a.second].k_hat();
              const std::size_t kb = entries[b.second].k_hat();
              if (ka != kb) return ka < kb;
              return a.first < b.first;
            });
  std::vector<ElementaryState> out;
  out.reserve(entries.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    out.push_back(std::move(entries[keyed[i].second]));
  }
  entries = std::move(out);
}

struct GridEnumerator {
  int n_qubits;
  std::size_t budget;
  std::size_t max_entries;
  std::vector<ElementaryState>* sink;

  // Candidate dyadics in [-1, 1] with their field lengths, cheapest first,
  // so the scan can stop at the first over-budget value.
  std::vector<std::pair<std::size_t, Rational>> slots;
  std::vector<ComplexRational> amps;
  std::size_t nodes = 0;

  void run() {
    const std::size_t zero_floor = 8 * ((std::size_t{1} << n_qubits) * 2 - 1);
    for (std::int64_t v : {std::int64_t{0}, std::int64_t{1}, std::int64_t{-1}}) {
      push_value(Rational(v, 1));
    }
    // Reduced dyadics k/2^g, k odd; the field cost at fixed g is constant,
    // so one over-budget probe rules the whole exponent out.
    for (int g = 1; g < 62; ++g) {
      const std::int64_t den = std::int64_t{1} << g;
      if (rational_field_length(Rational(1, den)) + zero_floor > budget) break;
      for (std::int64_t k = 1; k <= den; k += 2) {
        push_value(Rational(k, den));
        push_value(Rational(-k, den));
      }
    }
    std::sort(slots.begin(), slots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    amps.assign(std::size_t{1} << n_qubits, ComplexRational{});
    const std::size_t header = prefix_encoded_length(binary_magnitude(
        static_cast<std::uint64_t>(n_qubits), bit_length(n_qubits)));
    descend(0, header, 0.0, false);
  }

  void push_value(const Rational& r) {
    slots.emplace_back(rational_field_length(r), r);
  }

  // Slot s covers component s/2 (re for even s, im for odd s).
  void descend(std::size_t slot, std::size_t length, double norm2,
               bool seen_nonzero) {
    const std::size_t total_slots = amps.size() * 2;
    if (++nodes > 50'000'000) {
      throw ResourceError("enumerate_codebook: grid enumeration too large");
    }
    if (slot == total_slots) {
      if (norm2 < 0.25 || norm2 > 2.25) return;
      if (!seen_nonzero) return;
      try {
        ElementaryState state(n_qubits, amps);
        if (state.k_hat() <= budget) {
          sink->push_back(std::move(state));
          if (sink->size() > max_entries) {
            throw ResourceError("enumerate_codebook: entry cap exceeded");
          }
        }
      } catch (const ArgumentError&) {
        // outside the norm window for its precision
      }
      return;
    }
    const std::size_t remaining = total_slots - slot - 1;
    for (const auto& [cost, r] : slots) {
      // Zero components cost 8 bits each, the floor for what must follow.
      const std::size_t new_len = length + cost + 8 * remaining;
      if (new_len > budget) break;  // slots are sorted by cost
      if (!seen_nonzero && r.num < 0) continue;
      const double x = r.to_double();
      const double new_norm2 = norm2 + x * x;
      if (new_norm2 > 2.25) continue;
      if (slot % 2 == 0) {
        amps[slot / 2].re = r;
      } else {
        amps[slot / 2].im = r;
      }
      descend(slot + 1, length + cost, new_norm2,
              seen_nonzero || !r.is_zero());
      if (slot % 2 == 0) {
        amps[slot / 2].re = Rational::zero();
      } else {
        amps[slot / 2].im = Rational::zero();
      }
    }
  }
};

}  // namespace detail

/// Deterministic candidate generation. The book always holds, budget
/// permitting: every computational basis state; dyadic-sign uniform
/// superpositions over basis subsets of size 2^j (magnitudes are the nearest
/// dyadics to 2^{-j/2} at each feasible precision); and every dyadic grid
/// state whose encoding fits the budget. Entries are sorted by K-hat then
/// encoding, without duplicates.
inline Codebook enumerate_codebook(int n_qubits, std::size_t budget_bits,
                                   std::size_t max_entries = 1u << 20) {
  if (n_qubits < 0 || n_qubits > 16) {
    throw ArgumentError("enumerate_codebook: n_qubits out of range");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  std::vector<ElementaryState> entries;

  // Basis states.
  for (std::int64_t b = 0; b < dim; ++b) {
    std::vector<ComplexRational> amps(dim);
    amps[b].re = Rational(1, 1);
    ElementaryState state(n_qubits, std::move(amps));
    if (state.k_hat() <= budget_bits) entries.push_back(std::move(state));
  }

  // Uniform +/- superpositions over subsets of size 2^j, approximated on the
  // dyadic grid. Global sign is canonical (first member positive).
  for (int j = 1; j <= n_qubits; ++j) {
    const std::int64_t subset = std::int64_t{1} << j;
    const double target = std::exp2(-0.5 * j);
    for (int g = (j + 1) / 2; g < 62; ++g) {
      const std::int64_t den = std::int64_t{1} << g;
      const std::int64_t num =
          static_cast<std::int64_t>(std::llround(target * den));
      if (num == 0) continue;
      const Rational mag = Rational(num, den).reduced();
      // One subset's encoding length; identical across subsets and signs.
      // A zero amplitude costs 16 bits, a member amplitude costs the
      // magnitude field plus its zero imaginary part.
      const std::size_t all_zero_len = elementary_encoding_length(
          n_qubits, std::vector<ComplexRational>(dim));
      const std::size_t member_amp = detail::rational_field_length(mag) + 8;
      const std::size_t len =
          all_zero_len - 16 * subset + subset * member_amp;
      if (len > budget_bits) {
        if (g > j) break;  // lengths only grow from here
        continue;
      }
      // Enumerate index subsets of the given size.
      std::vector<std::int64_t> idx(subset);
      for (std::int64_t i = 0; i < subset; ++i) idx[i] = i;
      while (true) {
        for (std::int64_t signs = 0; signs < (std::int64_t{1} << (subset - 1));
             ++signs) {
          std::vector<ComplexRational> amps(dim);
          for (std::int64_t i = 0; i < subset; ++i) {
            const bool neg = i > 0 && ((signs >> (i - 1)) & 1);
            amps[idx[i]].re = neg ? Rational(-mag.num, mag.den) : mag;
          }
          try {
            ElementaryState state(n_qubits, std::move(amps));
            if (state.k_hat() <= budget_bits) {
              entries.push_back(std::move(state));
              if (entries.size() > max_entries) {
                throw ResourceError("enumerate_codebook: entry cap exceeded");
              }
            }
          } catch (const ArgumentError&) {
            // approximant outside its norm window; skip
          }
        }
        // Next combination.
        std::int64_t i = subset - 1;
        while (i >= 0 && idx[i] == dim - subset + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (std::int64_t t = i + 1; t < subset; ++t) idx[t] = idx[t - 1] + 1;
      }
    }
  }

  // Dyadic grid states within the budget.
  detail::GridEnumerator grid{n_qubits, budget_bits, max_entries, &entries,
                              {}, {}, 0};
  grid.run();

  detail::sort_and_dedupe(entries);
  Codebook book;
  book.entries = std::move(entries);
  book.generation_rule =
      "basis+uniform-dyadic-superpositions+dyadic-grid;budget=" +
      std::to_string(budget_bits);
  book.empty_budget_warning = book.entries.empty();
  return book;
}

// ---------------------------------------------------------------------------
// Elementary probabilities and randomness deficiency.
// ---------------------------------------------------------------------------

/// Finite-support probability measure with exact rational values summing to
/// exactly one.
class ElementaryProbability {
 public:
  explicit ElementaryProbability(
      std::vector<std::pair<BitString, Rational>> support)
      : support_(std::move(support)) {
    Rational sum = Rational::zero();
    std::map<BitString, bool> seen;
    for (const auto& [x, p] : support_) {
      if (p.num <= 0) throw ArgumentError("ElementaryProbability: p <= 0");
      if (seen.count(x)) {
        throw ArgumentError("ElementaryProbability: duplicate support point");
      }
      seen[x] = true;
      sum = sum + p;
    }
    if (!(sum == Rational(1, 1))) {
      throw ArgumentError("ElementaryProbability: probabilities sum to " +
                          std::to_string(sum.num) + "/" +
                          std::to_string(sum.den) + ", not 1");
    }
  }

  static ElementaryProbability uniform(const std::vector<BitString>& points) {
    std::vector<std::pair<BitString, Rational>> support;
    support.reserve(points.size());
    for (const auto& x : points) {
      support.emplace_back(
          x, Rational(1, static_cast<std::int64_t>(points.size())));
    }
    return ElementaryProbability(std::move(support));
  }

  const std::vector<std::pair<BitString, Rational>>& support() const {
    return support_;
  }

  std::optional<Rational> probability_of(const BitString& x) const {
    for (const auto& [y, p] : support_) {
      if (y == x) return p;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::pair<BitString, Rational>> support_;
};

/// Randomness deficiency with the computable proxy in place of conditional
/// complexity: floor(-log2 Q(x)) - K-hat(x). May be negative.
inline std::int64_t deficiency(const BitString& x,
                               const ElementaryProbability& q) {
  const auto p = q.probability_of(x);
  if (!p) throw ArgumentError("deficiency: x not in the support of Q");
  return static_cast<std::int64_t>(floor_neg_log2(*p)) -
         static_cast<std::int64_t>(proxy_complexity(x));
}

}  // namespace qel
