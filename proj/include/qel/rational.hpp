#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "qel/errors.hpp"

namespace qel {

namespace detail {

inline std::int64_t narrow_i64(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw Error(std::string(what) + ": rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Exact rational with int64 numerator/denominator. Denominator is always
/// positive; the pair is NOT forcibly reduced: the stored representation is
/// part of a state's identity (it fixes the encoding width). reduce() gives
/// the canonical reduced value when that is what is wanted.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw ArgumentError("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
  }

  static Rational zero() { return Rational(0, 1); }

  bool is_zero() const { return num == 0; }

  Rational reduced() const {
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g <= 1) {
      Rational r(num, den);
      if (r.num == 0) r.den = 1;
      return r;
    }
    return Rational(num / g, den / g);
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  /// Value equality (independent of representation).
  bool equals_value(const Rational& other) const {
    return static_cast<__int128>(num) * other.den ==
           static_cast<__int128>(other.num) * den;
  }
  bool operator==(const Rational& other) const = default;

  Rational operator+(const Rational& other) const {
    const __int128 n = static_cast<__int128>(num) * other.den +
                       static_cast<__int128>(other.num) * den;
    const __int128 d = static_cast<__int128>(den) * other.den;
    return reduced_from(n, d);
  }
  Rational operator*(const Rational& other) const {
    const __int128 n = static_cast<__int128>(num) * other.num;
    const __int128 d = static_cast<__int128>(den) * other.den;
    return reduced_from(n, d);
  }

 private:
  static Rational reduced_from(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    return Rational(detail::narrow_i64(n, "Rational"),
                    detail::narrow_i64(d, "Rational"));
  }
};

/// Complex number with rational real and imaginary parts.
struct ComplexRational {
  Rational re;
  Rational im;

  bool operator==(const ComplexRational& other) const = default;
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

/// floor(-log2(p)) for a rational p in (0, 1], computed exactly.
inline int floor_neg_log2(const Rational& p) {
  if (p.num <= 0) throw ArgumentError("floor_neg_log2: need p > 0");
  const __int128 a = p.num;
  const __int128 b = p.den;
  if (a > b) throw ArgumentError("floor_neg_log2: need p <= 1");
  // Largest t with a * 2^t <= b.
  int t = 0;
  __int128 scaled = a;
  while (scaled * 2 <= b) {
    scaled *= 2;
    ++t;
    if (t > 126) throw Error("floor_neg_log2: exponent overflow");
  }
  return t;
}

}  // namespace qel
