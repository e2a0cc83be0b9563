#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace watermark::detail {

/// SHA-256 digest of a byte message.
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> msg);

/// HMAC-SHA-256 composed from two SHA-256 passes (RFC 2104). Keys longer
/// than the 64-byte block are hashed down first, per the standard.
std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> msg);

} // namespace watermark::detail
