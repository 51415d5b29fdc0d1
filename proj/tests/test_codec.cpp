#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "qel/codec.hpp"
#include "qel/elfinder.hpp"
#include "test_util.hpp"

using namespace qel;

namespace {

// Format-arithmetic oracle, written out from the documented layout rather
// than the encoder: sign + 1^w 0 + payload(w) per integer, numerators padded
// to the denominator width, header = prefix-coded qubit count.
std::size_t oracle_int_field(int width) { return 1 + (width + 1) + width; }
std::size_t oracle_component(std::int64_t num, std::int64_t den) {
  const auto mag = static_cast<std::uint64_t>(num < 0 ? -num : num);
  const int den_w = bit_length(static_cast<std::uint64_t>(den));
  const int num_w = std::max(bit_length(mag), den_w);
  return oracle_int_field(num_w) + oracle_int_field(den_w);
}
std::size_t oracle_header(int n) {
  return 2 * bit_length(static_cast<std::uint64_t>(n)) + 1;
}

ElementaryState basis_elementary(int n, std::int64_t index) {
  std::vector<ComplexRational> amps(std::size_t{1} << n);
  amps[index].re = Rational(1, 1);
  return ElementaryState(n, std::move(amps));
}

ElementaryState plus_approximant(int g, bool reduce) {
  const std::int64_t den = std::int64_t{1} << g;
  const std::int64_t num = std::llround(std::sqrt(0.5) * den);
  Rational mag(num, den);
  if (reduce) mag = mag.reduced();
  std::vector<ComplexRational> amps(2);
  amps[0].re = mag;
  amps[1].re = mag;
  return ElementaryState(1, std::move(amps));
}

ElementaryState random_rational_state(Rng& rng) {
  const int n = 1 + static_cast<int>(rng.uniform_int(0, 2));
  const int precision = 2 + static_cast<int>(rng.uniform_int(0, 14));
  return rationalize(haar_sample(n, rng), precision);
}

}  // namespace

TEST_CASE("prefix code basics") {
  REQUIRE(prefix_encode(BitString::parse("")).str() == "0");
  REQUIRE(prefix_encode(BitString::parse("101")).str() == "1110101");

  SECTION("self-delimiting: decode splits payload from junk") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<bool> payload, junk;
      const int np = static_cast<int>(rng.uniform_int(0, 24));
      const int nj = static_cast<int>(rng.uniform_int(0, 24));
      for (int i = 0; i < np; ++i) payload.push_back(rng.uniform() < 0.5);
      for (int i = 0; i < nj; ++i) junk.push_back(rng.uniform() < 0.5);
      const BitString x{payload};
      BitString stream = prefix_encode(x);
      stream.append(BitString{junk});
      BitReader reader(stream);
      REQUIRE(prefix_decode(reader) == x);
      REQUIRE(reader.remaining() == junk.size());
      REQUIRE(prefix_encoded_length(x) == 2 * x.size() + 1);
    }
  }

  SECTION("the image is prefix-free") {
    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<bool> a, b;
      const int na = static_cast<int>(rng.uniform_int(0, 16));
      const int nb = static_cast<int>(rng.uniform_int(0, 16));
      for (int i = 0; i < na; ++i) a.push_back(rng.uniform() < 0.5);
      for (int i = 0; i < nb; ++i) b.push_back(rng.uniform() < 0.5);
      const BitString ea = prefix_encode(BitString{a});
      const BitString eb = prefix_encode(BitString{b});
      if (ea == eb) continue;
      REQUIRE_FALSE(ea.is_prefix_of(eb));
      REQUIRE_FALSE(eb.is_prefix_of(ea));
    }
  }
}

TEST_CASE("integer fields round trip and reject non-canonical zero") {
  for (std::int64_t v : {std::int64_t{0}, std::int64_t{1}, std::int64_t{-1},
                         std::int64_t{5}, std::int64_t{-73},
                         std::int64_t{1} << 40}) {
    BitString bits;
    const int width = std::max(
        1, bit_length(static_cast<std::uint64_t>(v < 0 ? -v : v)));
    append_integer_field(bits, v, width);
    BitReader reader(bits);
    REQUIRE(read_integer_field(reader) == v);
    REQUIRE(reader.at_end());
  }

  BitString minus_zero;
  minus_zero.push_back(true);  // sign
  minus_zero.append(prefix_encode(BitString::parse("0")));
  BitReader reader(minus_zero);
  REQUIRE_THROWS_AS(read_integer_field(reader), ArgumentError);
}

TEST_CASE("elementary state encoding is bit-exact and canonical") {
  SECTION("round trip reproduces the exact representation") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const ElementaryState state = random_rational_state(rng);
      const BitString bits = encode_elementary_state(state);
      const ElementaryState back = decode_elementary_state(bits);
      REQUIRE(back == state);
      REQUIRE(encode_elementary_state(back) == bits);
      REQUIRE(state.k_hat() == bits.size());
    }
  }

  SECTION("distinct representations give distinct encodings") {
    Rng rng(12);
    std::map<BitString, ElementaryState> seen;
    for (int trial = 0; trial < 400; ++trial) {
      const ElementaryState state = random_rational_state(rng);
      const auto [it, inserted] =
          seen.emplace(encode_elementary_state(state), state);
      if (!inserted) REQUIRE(it->second == state);
    }
  }

  SECTION("rational amplitudes are enforced at the type level") {
    REQUIRE_THROWS_AS(Rational(1, 0), ArgumentError);
  }

  SECTION("malformed streams are rejected") {
    const ElementaryState state = basis_elementary(1, 0);
    const BitString bits = encode_elementary_state(state);

    std::vector<bool> truncated;
    for (std::size_t i = 0; i + 5 < bits.size(); ++i) {
      truncated.push_back(bits[i]);
    }
    REQUIRE_THROWS_AS(decode_elementary_state(BitString{truncated}),
                      ArgumentError);

    BitString padded = bits;
    padded.push_back(false);
    REQUIRE_THROWS_AS(decode_elementary_state(padded), ArgumentError);

    // Implausible qubit count in the header.
    BitString huge = prefix_encode(binary_magnitude(4096, 13));
    REQUIRE_THROWS_AS(decode_elementary_state(huge), ArgumentError);
  }
}

TEST_CASE("rational arithmetic guards against overflow") {
  const Rational big(1, std::int64_t{1} << 62);
  const Rational other(1, (std::int64_t{1} << 62) - 1);  // coprime dens
  REQUIRE_THROWS_AS(big + other, Error);
  REQUIRE((Rational(1, 4) + Rational(1, 4)).equals_value(Rational(1, 2)));
  REQUIRE((Rational(2, 3) * Rational(3, 2)).equals_value(Rational(1, 1)));
}

TEST_CASE("proxy complexity matches the format arithmetic") {
  SECTION("K-hat of |0> on one qubit is the format constant") {
    const ElementaryState zero = basis_elementary(1, 0);
    const std::size_t expected = oracle_header(1) + oracle_component(1, 1) +
                                 3 * oracle_component(0, 1);
    REQUIRE(expected == 35);
    REQUIRE(proxy_complexity(zero) == expected);
  }

  SECTION("basis-state K-hat grows linearly in 2^n") {
    for (int n = 1; n <= 4; ++n) {
      REQUIRE(proxy_complexity(basis_elementary(n, 0)) ==
              oracle_header(n) + 16 * (std::size_t{1} << n));
    }
  }

  SECTION("|0> is shorter than every two-bit-or-wider |+> approximant") {
    const std::size_t zero_len = proxy_complexity(basis_elementary(1, 0));
    for (int g = 2; g <= 10; ++g) {
      REQUIRE(proxy_complexity(plus_approximant(g, true)) > zero_len);
      REQUIRE(proxy_complexity(plus_approximant(g, false)) > zero_len);
    }
  }

  SECTION("equal states have equal K-hat") {
    const ElementaryState a = basis_elementary(2, 1);
    const ElementaryState b = basis_elementary(2, 1);
    REQUIRE(a == b);
    REQUIRE(proxy_complexity(a) == proxy_complexity(b));
  }

  SECTION("compressed proxy is deterministic and positive") {
    const ElementaryState state = plus_approximant(6, false);
    const std::size_t a = compressed_complexity(state);
    REQUIRE(a > 0);
    REQUIRE(a == compressed_complexity(state));
  }
}

TEST_CASE("renormalization flag tracks exactness") {
  REQUIRE_FALSE(basis_elementary(2, 3).needs_renorm());
  const ElementaryState approx = plus_approximant(2, true);
  REQUIRE(approx.needs_renorm());
  REQUIRE(std::abs(approx.normalized().amplitudes().norm() - 1.0) < 1e-12);
  Vector plus(2);
  plus << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  REQUIRE(PureState(1, plus).fidelity(approx.normalized()) > 0.99);
}

TEST_CASE("codebook enumeration") {
  SECTION("one qubit with a generous budget") {
    const Codebook book = enumerate_codebook(1, 64);
    REQUIRE_FALSE(book.empty_budget_warning);

    bool has_zero = false, has_one = false, has_plus = false, has_minus = false;
    for (const auto& entry : book.entries) {
      if (entry == basis_elementary(1, 0)) has_zero = true;
      if (entry == basis_elementary(1, 1)) has_one = true;
      const auto& a = entry.amplitudes();
      if (!a[0].re.is_zero() && !a[1].re.is_zero() && a[0].im.is_zero() &&
          a[1].im.is_zero() && a[0].re.den >= 2) {
        if (a[0].re == a[1].re) has_plus = true;
        if (a[0].re.num == -a[1].re.num && a[0].re.den == a[1].re.den) {
          has_minus = true;
        }
      }
    }
    REQUIRE(has_zero);
    REQUIRE(has_one);
    REQUIRE(has_plus);
    REQUIRE(has_minus);
  }

  SECTION("entries are sorted by K-hat then encoding, without duplicates") {
    const Codebook book = enumerate_codebook(1, 60);
    for (std::size_t i = 1; i < book.entries.size(); ++i) {
      const auto ka = book.entries[i - 1].k_hat();
      const auto kb = book.entries[i].k_hat();
      REQUIRE(ka <= kb);
      if (ka == kb) {
        REQUIRE(book.entries[i - 1].encoding() < book.entries[i].encoding());
      }
    }
  }

  SECTION("doubling the budget never removes entries") {
    const Codebook small = enumerate_codebook(1, 40);
    const Codebook big = enumerate_codebook(1, 80);
    REQUIRE(small.size() > 0);
    REQUIRE(big.size() >= small.size());
    std::set<BitString> big_set;
    for (const auto& e : big.entries) big_set.insert(e.encoding());
    std::size_t missing = 0;
    for (const auto& e : small.entries) {
      if (!big_set.count(e.encoding())) ++missing;
    }
    REQUIRE(missing == 0);
  }

  SECTION("a budget below the smallest state is an empty-book warning") {
    const Codebook book = enumerate_codebook(1, 10);
    REQUIRE(book.empty());
    REQUIRE(book.empty_budget_warning);
  }

  SECTION("Kraft sum over distinct encodings stays below one") {
    const Codebook book = enumerate_codebook(1, 70);
    REQUIRE(book.size() > 10);
    long double kraft = 0.0L;
    for (const auto& e : book.entries) {
      kraft += std::exp2(-static_cast<long double>(e.k_hat()));
    }
    REQUIRE(kraft <= 1.0L);
  }
}

TEST_CASE("complexity upper bound") {
  const Codebook basis_book = [&] {
    Codebook book;
    book.entries = {basis_elementary(1, 0), basis_elementary(1, 1)};
    return book;
  }();

  SECTION("a state in the book costs exactly its K-hat") {
    const ComplexityEstimate est =
        complexity_upper_bound(basis_elementary(1, 0).normalized(), basis_book);
    REQUIRE(est.value == Catch::Approx(35.0));
    REQUIRE(est.fidelity_term == 0.0);
    REQUIRE(est.witness == basis_elementary(1, 0));
  }

  SECTION("|+> against basis states costs K-hat + 1 bit") {
    Vector plus(2);
    plus << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
    const ComplexityEstimate est =
        complexity_upper_bound(PureState(1, plus), basis_book);
    REQUIRE(est.value == Catch::Approx(36.0).epsilon(1e-12));
    REQUIRE(est.fidelity_term == Catch::Approx(1.0).epsilon(1e-12));
  }

  SECTION("minimization agrees with an independent exhaustive scan") {
    Rng rng(21);
    Codebook book = enumerate_codebook(1, 64);
    for (int trial = 0; trial < 20; ++trial) {
      const PureState phi = haar_sample(1, rng);
      const ComplexityEstimate est = complexity_upper_bound(phi, book);

      double best_value = 0.0;
      const ElementaryState* best = nullptr;
      std::size_t min_contract_violations = 0;
      for (const auto& entry : book.entries) {
        const double f = phi.fidelity(entry.normalized());
        if (f < 1e-15) continue;
        const double value = static_cast<double>(entry.k_hat()) - std::log2(f);
        const bool better =
            best == nullptr || value < best_value ||
            (value == best_value &&
             (entry.k_hat() < best->k_hat() ||
              (entry.k_hat() == best->k_hat() &&
               entry.encoding() < best->encoding())));
        if (better) {
          best_value = value;
          best = &entry;
        }
        if (est.value > value + 1e-12) ++min_contract_violations;
      }
      REQUIRE(min_contract_violations == 0);  // bound holds for every entry
      REQUIRE(best != nullptr);
      REQUIRE(est.value == Catch::Approx(best_value));
      REQUIRE(est.witness == *best);
    }
  }

  SECTION("extending the codebook never increases the bound") {
    Rng rng(22);
    const Codebook small = enumerate_codebook(1, 52);
    const Codebook big = enumerate_codebook(1, 64);
    REQUIRE(big.size() > small.size());
    for (int trial = 0; trial < 10; ++trial) {
      const PureState phi = haar_sample(1, rng);
      REQUIRE(complexity_upper_bound(phi, big).value <=
              complexity_upper_bound(phi, small).value + 1e-12);
    }
  }

  SECTION("errors: empty book, unreachable state") {
    Codebook empty;
    Vector plus(2);
    plus << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
    REQUIRE_THROWS_AS(complexity_upper_bound(PureState(1, plus), empty),
                      ArgumentError);

    Codebook zero_only;
    zero_only.entries = {basis_elementary(1, 0)};
    REQUIRE_THROWS_AS(
        complexity_upper_bound(PureState::basis(1, 1), zero_only),
        NoWitnessError);
  }
}

TEST_CASE("randomness deficiency") {
  SECTION("uniform over 2^k equal-complexity strings gives k - c") {
    // All 8 strings of length 3: K-hat = 2*3 + 1 = 7, -log2 Q = 3.
    std::vector<BitString> points;
    for (int v = 0; v < 8; ++v) {
      std::vector<bool> bits = {bool(v & 4), bool(v & 2), bool(v & 1)};
      points.emplace_back(bits);
    }
    const ElementaryProbability q = ElementaryProbability::uniform(points);
    for (const auto& x : points) {
      REQUIRE(deficiency(x, q) == 3 - 7);
    }
  }

  SECTION("a point mass gives -K-hat") {
    const BitString x = BitString::parse("1100");
    const ElementaryProbability q({{x, Rational(1, 1)}});
    REQUIRE(deficiency(x, q) == -static_cast<std::int64_t>(2 * 4 + 1));
  }

  SECTION("uniform over 8 random 20-bit strings matches the hand formula") {
    Rng rng(17);
    std::set<BitString> unique;
    while (unique.size() < 8) {
      std::vector<bool> bits(20);
      for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = rng.uniform() < 0.5;
      }
      unique.insert(BitString{bits});
    }
    std::vector<BitString> points(unique.begin(), unique.end());
    const ElementaryProbability q = ElementaryProbability::uniform(points);
    for (const auto& x : points) {
      // floor(-log2 1/8) = 3, K-hat = 2*20 + 1 = 41.
      REQUIRE(deficiency(x, q) == 3 - 41);
    }
  }

  SECTION("membership and measure validation") {
    const ElementaryProbability q({{BitString::parse("0"), Rational(1, 2)},
                                   {BitString::parse("1"), Rational(1, 2)}});
    REQUIRE_THROWS_AS(deficiency(BitString::parse("00"), q), ArgumentError);
    REQUIRE_THROWS_AS(
        ElementaryProbability({{BitString::parse("0"), Rational(1, 2)},
                               {BitString::parse("1"), Rational(1, 3)}}),
        ArgumentError);
    REQUIRE_THROWS_AS(
        ElementaryProbability({{BitString::parse("0"), Rational(1, 2)},
                               {BitString::parse("0"), Rational(1, 2)}}),
        ArgumentError);
  }

  SECTION("exact floor of -log2 on rationals") {
    REQUIRE(floor_neg_log2(Rational(1, 1)) == 0);
    REQUIRE(floor_neg_log2(Rational(1, 8)) == 3);
    REQUIRE(floor_neg_log2(Rational(2, 15)) == 2);  // -log2 = 2.906...
    REQUIRE(floor_neg_log2(Rational(1, 7)) == 2);   // -log2 = 2.807...
    REQUIRE(floor_neg_log2(Rational(3, 4)) == 0);
    REQUIRE_THROWS_AS(floor_neg_log2(Rational(3, 2)), ArgumentError);
  }
}

TEST_CASE("kraft sum over sampled batches stays below one") {
  Rng rng(29);
  std::set<BitString> encodings;
  for (int trial = 0; trial < 500; ++trial) {
    encodings.insert(random_rational_state(rng).encoding());
  }
  long double kraft = 0.0L;
  for (const auto& e : encodings) {
    kraft += std::exp2(-static_cast<long double>(e.size()));
  }
  REQUIRE(kraft <= 1.0L);
}
