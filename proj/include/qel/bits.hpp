#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "qel/errors.hpp"

namespace qel {

/// Finite sequence over {0,1}. Thin wrapper over vector<bool> with
/// lexicographic ordering and prefix queries.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<bool> bits) : bits_(std::move(bits)) {}

  static BitString parse(const std::string& s) {
    std::vector<bool> b;
    b.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw ArgumentError("BitString: bad digit");
      b.push_back(c == '1');
    }
    return BitString(std::move(b));
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }

  void push_back(bool b) { bits_.push_back(b); }
  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  bool operator==(const BitString& other) const = default;
  /// Lexicographic; shorter strings precede their extensions.
  std::strong_ordering operator<=>(const BitString& other) const {
    return bits_ <=> other.bits_;
  }

  bool is_prefix_of(const BitString& other) const {
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (bits_[i] != other.bits_[i]) return false;
    }
    return true;
  }

  std::string str() const {
    std::string s;
    s.reserve(size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  /// MSB-first byte packing, zero padded; used only at the outermost
  /// container level (files, compressor input).
  std::vector<std::uint8_t> pack_bytes() const {
    std::vector<std::uint8_t> out((size() + 7) / 8, 0);
    for (std::size_t i = 0; i < size(); ++i) {
      if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return out;
  }

 private:
  std::vector<bool> bits_;
};

/// Sequential reader over a BitString; exposes the position so decoded
/// prefixes compose ("decode, then the rest").
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }
  bool at_end() const { return pos_ == bits_->size(); }

  bool read_bit() {
    if (at_end()) throw ArgumentError("BitReader: read past end");
    return (*bits_)[pos_++];
  }

  BitString read_bits(std::size_t count) {
    if (remaining() < count) throw ArgumentError("BitReader: read past end");
    std::vector<bool> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back((*bits_)[pos_++]);
    return BitString(std::move(out));
  }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

/// Self-delimiting code: x -> 1^{|x|} 0 x. Output length is 2|x| + 1 and the
/// image is prefix-free.
inline BitString prefix_encode(const BitString& x) {
  BitString out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(true);
  out.push_back(false);
  out.append(x);
  return out;
}

inline BitString prefix_decode(BitReader& reader) {
  std::size_t len = 0;
  while (reader.read_bit()) ++len;
  return reader.read_bits(len);
}

/// Length of prefix_encode(x) without materializing it. Used as the
/// complexity proxy for plain strings.
inline std::size_t prefix_encoded_length(const BitString& x) {
  return 2 * x.size() + 1;
}

inline int bit_length(std::uint64_t v) {
  return v == 0 ? 0 : 64 - std::countl_zero(v);
}

/// Magnitude in MSB-first binary, zero padded on the left to `width` bits.
/// width == bit_length(v) gives the minimal form.
inline BitString binary_magnitude(std::uint64_t v, int width) {
  if (width < bit_length(v)) throw ArgumentError("binary_magnitude: width");
  std::vector<bool> out;
  out.reserve(width);
  for (int i = width - 1; i >= 0; --i) out.push_back((v >> i) & 1u);
  return BitString(std::move(out));
}

inline std::uint64_t magnitude_value(const BitString& bits) {
  if (bits.size() > 64) throw ArgumentError("magnitude_value: too wide");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    v = (v << 1) | (bits[i] ? 1u : 0u);
  }
  return v;
}

/// Signed integer field: sign bit, then the prefix-coded magnitude at the
/// given width. Zero must carry sign 0.
inline void append_integer_field(BitString& out, std::int64_t v, int width) {
  out.push_back(v < 0);
  const std::uint64_t mag =
      v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
  out.append(prefix_encode(binary_magnitude(mag, width)));
}

inline std::int64_t read_integer_field(BitReader& reader) {
  const bool negative = reader.read_bit();
  const std::uint64_t mag = magnitude_value(prefix_decode(reader));
  if (mag == 0 && negative) {
    throw ArgumentError("integer field: non-canonical negative zero");
  }
  if (mag > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ArgumentError("integer field: magnitude overflow");
  }
  return negative ? -static_cast<std::int64_t>(mag)
                  : static_cast<std::int64_t>(mag);
}

/// Field length bookkeeping, kept next to the encoders so the two cannot
/// drift apart: sign + 1^w 0 + w payload bits.
inline std::size_t integer_field_length(int width) {
  return 2 + 2 * static_cast<std::size_t>(width);
}

}  // namespace qel
