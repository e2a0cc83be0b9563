#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "watermark/key.hpp"

namespace watermark {

/// A real number in [0, 1) stored as a 64-bit fixed-point fraction:
/// value = raw / 2^64. Comparisons against probabilities in the same
/// representation are exact integer comparisons.
struct UnitReal {
  std::uint64_t raw = 0;

  double to_double() const { return static_cast<double>(raw) * 0x1.0p-64; }

  /// True iff the value is below one half.
  bool below_half() const { return (raw >> 63) == 0; }

  bool operator==(const UnitReal&) const = default;
};

/// Value at position `index` of the keyed stream shared by embedder and
/// detector: the first 64 bits of HMAC-SHA-256(key_material, 8-byte
/// big-endian index), as a fraction over 2^64.
UnitReal unit_real_at(const SecretKey& sk, std::uint64_t index);

/// Cursor over the keyed stream with a growable cache, so that repeated
/// detections under one key do not recompute the stream. Positions are
/// 0-based and every embedding or detection attempt reads from position 0;
/// the cursor is a convenience for sequential consumers. Single-owner: not
/// safe to share across threads.
class RandomStream {
public:
  explicit RandomStream(SecretKey key, std::uint64_t scope = 0)
      : key_(std::move(key)), scope_(scope) {}

  const SecretKey& key() const { return key_; }
  std::uint64_t scope() const { return scope_; }
  std::size_t index() const { return index_; }

  void reset() { index_ = 0; }

  UnitReal next() {
    const UnitReal r = at(index_);
    ++index_;
    return r;
  }

  /// Random access; extends the cache as needed.
  UnitReal at(std::size_t index) {
    if (index >= raw_.size()) extend_to(index + 1);
    return UnitReal{raw_[index]};
  }

  /// Packed detector guide bits: bit j of the stream (1 iff r_j < 1/2) at
  /// most-significant-first position j of word j/64, mirroring BitString
  /// packing. At least `words` words are returned.
  std::span<const std::uint64_t> guide_words(std::size_t words);

private:
  void extend_to(std::size_t n);

  SecretKey key_;
  std::uint64_t scope_;
  std::size_t index_ = 0;
  std::vector<std::uint64_t> raw_;
  std::vector<std::uint64_t> guide_;
};

} // namespace watermark
