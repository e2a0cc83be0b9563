#pragma once

#include <cstdint>

namespace watermark::detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Small deterministic generator for model randomness, attack randomness and
/// test corpora. Not cryptographic; the keyed stream handles that side.
/// Identical output on every platform.
class SplitMix {
public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  /// Unbiased draw from [0, n), n >= 1, by rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n; // 2^64 mod n
    for (;;) {
      const std::uint64_t v = next();
      if (v >= min) return v % n;
    }
  }

  bool coin() { return next() >> 63; }

  double unit_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

} // namespace watermark::detail
