#include "watermark/detail/scan.hpp"

#include <bit>

namespace watermark::detail {

namespace {

inline std::uint64_t window_word(std::span<const std::uint64_t> bits,
                                 std::size_t bit_pos) {
  const std::size_t base = bit_pos >> 6;
  const std::size_t sh = bit_pos & 63;
  if (base >= bits.size()) return 0;
  std::uint64_t v = bits[base] << sh;
  if (sh && base + 1 < bits.size())
    v |= bits[base + 1] >> (64 - sh);
  return v;
}

} // namespace

FirstPassage first_passage(std::span<const std::uint64_t> bits,
                           std::size_t offset, std::size_t len,
                           std::span<const std::uint64_t> guide,
                           ScanThreshold th) {
  using u128 = unsigned __int128;

  std::size_t i = 0; // prefix length consumed so far
  std::size_t S = 0;
  std::int64_t w = 0; // 2S - i
  std::size_t word = 0;

  while (i < len) {
    const std::size_t take = (len - i) < 64 ? (len - i) : 64;
    std::uint64_t xw = window_word(bits, offset + i) ^ guide[word];
    if (take < 64)
      xw &= ~0ull << (64 - take);

    // Whole-word skip: within this word |w| grows by at most `take`, while
    // the right-hand side is at least n_coef * (i + 1), so if even the
    // extreme walk cannot pass, no per-bit check can either.
    const std::uint64_t wmax =
        static_cast<std::uint64_t>(w < 0 ? -w : w) + take;
    if (u128(th.wsq_coef) * wmax * wmax <= u128(th.n_coef) * (i + 1)) {
      const int ones = std::popcount(xw);
      S += ones;
      i += take;
      w += 2 * ones - static_cast<std::int64_t>(take);
      ++word;
      continue;
    }

    for (std::size_t k = 0; k < take; ++k) {
      const std::uint64_t bit = (xw >> (63 - k)) & 1u;
      S += bit;
      ++i;
      w += bit ? 1 : -1;
      if (th.passes(i, w))
        return {true, i, S};
    }
    ++word;
  }
  return {false, 0, 0};
}

} // namespace watermark::detail
