#include "watermark/key.hpp"

#include <cstdio>
#include <sstream>

#include "watermark/detail/crypto.hpp"

namespace watermark {

namespace {

std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<std::uint8_t> hex_decode(const std::string& hex) {
  if (hex.size() % 2 != 0)
    throw MalformedInputError("hex string has odd length");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
      throw MalformedInputError("invalid hex digit at position " +
                                std::to_string(2 * i));
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

} // namespace

std::string SecretKey::fingerprint() const {
  const auto digest = detail::sha256(key_material);
  return hex_encode(std::span<const std::uint8_t>(digest.data(), 8));
}

SecretKey keygen(std::uint32_t lambda, std::span<const std::uint8_t> entropy) {
  if (lambda < 8)
    throw Error("lambda must be at least 8, got " + std::to_string(lambda));
  if (entropy.size() * 8 < lambda)
    throw Error("insufficient entropy: need at least " +
                std::to_string(lambda) + " bits, got " +
                std::to_string(entropy.size() * 8));

  const std::size_t out_bits = lambda > 256 ? lambda : 256;
  const std::size_t out_bytes = (out_bits + 7) / 8;

  // Counter-mode expansion of the entropy through the hash.
  SecretKey sk;
  sk.lambda = lambda;
  sk.key_material.reserve(out_bytes);
  std::vector<std::uint8_t> buf(entropy.begin(), entropy.end());
  buf.resize(entropy.size() + 4);
  for (std::uint32_t counter = 0; sk.key_material.size() < out_bytes;
       ++counter) {
    buf[entropy.size() + 0] = static_cast<std::uint8_t>(counter >> 24);
    buf[entropy.size() + 1] = static_cast<std::uint8_t>(counter >> 16);
    buf[entropy.size() + 2] = static_cast<std::uint8_t>(counter >> 8);
    buf[entropy.size() + 3] = static_cast<std::uint8_t>(counter);
    const auto block = detail::sha256(buf);
    for (std::uint8_t b : block) {
      if (sk.key_material.size() == out_bytes) break;
      sk.key_material.push_back(b);
    }
  }
  return sk;
}

std::string key_to_text(const SecretKey& sk) {
  return hex_encode(sk.key_material) + "\n" + std::to_string(sk.lambda) + "\n";
}

SecretKey key_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string hex, lambda_line;
  if (!std::getline(in, hex) || !std::getline(in, lambda_line))
    throw MalformedInputError("key file needs two lines: hex key material "
                              "and decimal lambda");
  SecretKey sk;
  sk.key_material = hex_decode(hex);
  try {
    sk.lambda = static_cast<std::uint32_t>(std::stoul(lambda_line));
  } catch (const std::exception&) {
    throw MalformedInputError("invalid lambda line in key file", 2);
  }
  if (sk.key_material.size() * 8 < sk.lambda)
    throw MalformedInputError("key material shorter than lambda bits");
  return sk;
}

} // namespace watermark
