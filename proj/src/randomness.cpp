#include "watermark/randomness.hpp"

#include <array>

#include "watermark/detail/crypto.hpp"

namespace watermark {

UnitReal unit_real_at(const SecretKey& sk, std::uint64_t index) {
  std::array<std::uint8_t, 8> msg;
  for (int i = 0; i < 8; ++i)
    msg[i] = static_cast<std::uint8_t>(index >> (56 - 8 * i));
  const auto mac = detail::hmac_sha256(sk.key_material, msg);
  std::uint64_t raw = 0;
  for (int i = 0; i < 8; ++i)
    raw = (raw << 8) | mac[i];
  return UnitReal{raw};
}

void RandomStream::extend_to(std::size_t n) {
  const std::size_t old = raw_.size();
  if (n <= old) return;
  for (std::size_t i = old; i < n; ++i)
    raw_.push_back(unit_real_at(key_, i).raw);
  // Keep the packed guide bits in step with the raw cache. push_back keeps
  // growth amortized for one-at-a-time cursor use.
  const std::size_t words = (raw_.size() + 63) / 64;
  while (guide_.size() < words) guide_.push_back(0);
  for (std::size_t i = old; i < raw_.size(); ++i)
    if ((raw_[i] >> 63) == 0)
      guide_[i >> 6] |= 1ull << (63 - (i & 63));
}

std::span<const std::uint64_t> RandomStream::guide_words(std::size_t words) {
  if (guide_.size() < words) extend_to(words * 64);
  return guide_;
}

} // namespace watermark
