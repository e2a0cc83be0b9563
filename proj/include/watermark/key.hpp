#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "watermark/errors.hpp"

namespace watermark {

/// Watermark key: uniformly random key material plus the security parameter
/// it was generated for. Key material is always at least lambda bits.
struct SecretKey {
  std::vector<std::uint8_t> key_material;
  std::uint32_t lambda = 0;

  bool operator==(const SecretKey&) const = default;

  /// First 8 bytes of SHA-256(key_material), hex-encoded. Safe to log.
  std::string fingerprint() const;
};

/// Derives a key deterministically from caller-supplied entropy, so tests
/// and CLI runs are reproducible. Requires at least lambda bits of entropy
/// and lambda >= 8. Output key material is max(256, lambda) bits, rounded up
/// to whole bytes.
SecretKey keygen(std::uint32_t lambda, std::span<const std::uint8_t> entropy);

/// Key file format: two lines, hex-encoded key material then decimal lambda.
std::string key_to_text(const SecretKey& sk);
SecretKey key_from_text(const std::string& text);

} // namespace watermark
