#include "watermark/bits.hpp"

#include <bit>

namespace watermark {

BitString BitString::substr(std::size_t pos, std::size_t len) const {
  if (pos + len > size_)
    throw Error("substr range [" + std::to_string(pos) + ", " +
                std::to_string(pos + len) + ") out of bounds for length " +
                std::to_string(size_));
  BitString out;
  out.size_ = len;
  out.words_.assign((len + 63) / 64, 0);
  const std::size_t shift = pos & 63;
  const std::size_t base = pos >> 6;
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    std::uint64_t v = words_[base + w] << shift;
    if (shift && base + w + 1 < words_.size())
      v |= words_[base + w + 1] >> (64 - shift);
    out.words_[w] = v;
  }
  // Clear bits past the end of the final word.
  if (len & 63)
    out.words_.back() &= ~0ull << (64 - (len & 63));
  return out;
}

BitString& BitString::append(const BitString& other) {
  if (this == &other) {
    const BitString copy = other;
    return append(copy);
  }
  if ((size_ & 63) == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return *this;
  }
  for (std::size_t i = 0; i < other.size_; ++i)
    push_back(other[i]);
  return *this;
}

bool BitString::operator==(const BitString& other) const {
  return size_ == other.size_ && words_ == other.words_;
}

std::uint64_t BitString::tail64() const {
  if (size_ == 0) return 0;
  const std::size_t take = size_ < 64 ? size_ : 64;
  const std::size_t pos = size_ - take;
  std::uint64_t v = 0;
  const std::size_t shift = pos & 63;
  const std::size_t base = pos >> 6;
  v = words_[base] << shift;
  if (shift && base + 1 < words_.size())
    v |= words_[base + 1] >> (64 - shift);
  // v now holds the tail bits at the top; move them to the low end.
  return take == 64 ? v : v >> (64 - take);
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size())
    throw LengthMismatchError(a.size(), b.size());
  std::size_t count = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i)
    count += std::popcount(wa[i] ^ wb[i]);
  return count;
}

BitString bits_from_bytes(std::span<const std::uint8_t> data) {
  BitString out;
  out.reserve(data.size() * 8);
  for (std::uint8_t byte : data)
    for (int k = 7; k >= 0; --k)
      out.push_back((byte >> k) & 1u);
  return out;
}

std::vector<std::uint8_t> bytes_from_bits(const BitString& b) {
  if (b.size() % 8 != 0)
    throw PaddingError(b.size());
  std::vector<std::uint8_t> out(b.size() / 8, 0);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (7 - (i % 8)));
  return out;
}

} // namespace watermark
