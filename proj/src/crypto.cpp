#include "watermark/detail/crypto.hpp"

#include <cstring>
#include <stdexcept>
#include <vector>

#include <openssl/evp.h>

namespace watermark::detail {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> msg) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != 32)
    throw std::runtime_error("SHA-256 failed");
  return out;
}

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> msg) {
  constexpr std::size_t kBlock = 64;

  std::array<std::uint8_t, kBlock> k{};
  if (key.size() > kBlock) {
    const auto digest = sha256(key);
    std::memcpy(k.data(), digest.data(), digest.size());
  } else {
    std::memcpy(k.data(), key.data(), key.size());
  }

  std::vector<std::uint8_t> inner(kBlock + msg.size());
  for (std::size_t i = 0; i < kBlock; ++i)
    inner[i] = static_cast<std::uint8_t>(k[i] ^ 0x36);
  std::memcpy(inner.data() + kBlock, msg.data(), msg.size());
  const auto inner_digest = sha256(inner);

  std::array<std::uint8_t, kBlock + 32> outer{};
  for (std::size_t i = 0; i < kBlock; ++i)
    outer[i] = static_cast<std::uint8_t>(k[i] ^ 0x5c);
  std::memcpy(outer.data() + kBlock, inner_digest.data(), inner_digest.size());
  return sha256(outer);
}

} // namespace watermark::detail
