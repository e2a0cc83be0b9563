#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "watermark/errors.hpp"

namespace watermark {

/// One of the three detector states. Embedding accepts Zero and One only;
/// Bottom is produced by detection when no signal is present.
enum class WatermarkSignal : std::uint8_t { Zero = 0, One = 1, Bottom = 2 };

inline WatermarkSignal signal_from_bit(bool b) {
  return b ? WatermarkSignal::One : WatermarkSignal::Zero;
}

inline bool bit_from_signal(WatermarkSignal m) {
  if (m == WatermarkSignal::Bottom)
    throw Error("bottom signal has no bit value");
  return m == WatermarkSignal::One;
}

inline char signal_char(WatermarkSignal m) {
  switch (m) {
  case WatermarkSignal::Zero: return '0';
  case WatermarkSignal::One:  return '1';
  default:                    return '_';
  }
}

/// Dynamically sized bit string. Bits are indexed from 0 and packed
/// most-significant-bit first into 64-bit words, so that word w holds bits
/// [64w, 64w+63] with bit 64w in the top position. The packing matches the
/// byte conversions below (byte 0's top bit is bit 0).
class BitString {
public:
  BitString() = default;

  static BitString zeros(std::size_t n) {
    BitString b;
    b.size_ = n;
    b.words_.assign((n + 63) / 64, 0);
    return b;
  }

  /// Parses an ASCII string of '0'/'1' characters.
  static BitString from_string(std::string_view s) {
    BitString b;
    b.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '0') b.push_back(false);
      else if (s[i] == '1') b.push_back(true);
      else throw MalformedInputError("invalid bit character at position " +
                                     std::to_string(i));
    }
    return b;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  void reserve(std::size_t n) { words_.reserve((n + 63) / 64); }

  void push_back(bool bit) {
    if ((size_ & 63) == 0) words_.push_back(0);
    if (bit) words_[size_ >> 6] |= (1ull << (63 - (size_ & 63)));
    ++size_;
  }

  bool operator[](std::size_t i) const {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1u;
  }

  void set(std::size_t i, bool bit) {
    const std::uint64_t mask = 1ull << (63 - (i & 63));
    if (bit) words_[i >> 6] |= mask;
    else     words_[i >> 6] &= ~mask;
  }

  void flip(std::size_t i) { words_[i >> 6] ^= (1ull << (63 - (i & 63))); }

  /// Bits [pos, pos+len), std::string::substr-style.
  BitString substr(std::size_t pos, std::size_t len) const;

  BitString& append(const BitString& other);

  friend BitString operator+(BitString lhs, const BitString& rhs) {
    lhs.append(rhs);
    return lhs;
  }

  bool operator==(const BitString& other) const;
  bool operator!=(const BitString& other) const { return !(*this == other); }

  /// Packed words, for word-at-a-time consumers. The final word's unused
  /// low bits are zero.
  std::span<const std::uint64_t> words() const { return words_; }

  /// Last min(64, size) bits packed into the low end of a word.
  std::uint64_t tail64() const;

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Number of positions where a and b differ. Throws LengthMismatchError on
/// unequal operands.
std::size_t hamming_distance(const BitString& a, const BitString& b);

/// Most-significant-bit-first expansion of a byte sequence; output length is
/// 8 times the input length.
BitString bits_from_bytes(std::span<const std::uint8_t> data);

inline BitString bits_from_bytes(std::string_view text) {
  return bits_from_bytes(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Exact inverse of bits_from_bytes. Throws PaddingError when the length is
/// not a whole number of bytes.
std::vector<std::uint8_t> bytes_from_bits(const BitString& b);

} // namespace watermark
