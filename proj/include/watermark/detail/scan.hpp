#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace watermark::detail {

// The stopping rule compares exp(-c*n*(X-1/2)^2) against e^(-eps*lambda)
// with X = S/n. Writing w = 2S - n, the comparison
//
//     exp(-c*n*(X-1/2)^2) < exp(-eps*lambda)
// <=> c * w^2 * eps_den > 4 * lambda * eps_num * n
//
// is exact in integers, which keeps embedder and detector bit-identical and
// makes ties (equality) deterministically non-passing.
struct ScanThreshold {
  std::uint64_t wsq_coef = 0; // c * eps_den
  std::uint64_t n_coef = 0;   // 4 * lambda * eps_num

  bool passes(std::uint64_t n, std::int64_t w) const {
    using u128 = unsigned __int128;
    const u128 lhs = u128(wsq_coef) * u128(w * w);
    const u128 rhs = u128(n_coef) * n;
    return lhs > rhs;
  }

  /// Smallest n any scan can pass at: |w| <= n forces n > n_coef/wsq_coef.
  std::uint64_t min_passing_length() const {
    return n_coef / wsq_coef + 1;
  }
};

struct FirstPassage {
  bool found = false;
  std::size_t length = 0;      // prefix length at the first passage
  std::size_t score_count = 0; // S at the first passage
};

/// First prefix i of the window bits[offset, offset+len) at which the
/// threshold passes, where the i-th score bit is guide[i-1] XOR
/// bits[offset+i-1]. Bit packing is BitString's (MSB-first words). Scans
/// whole words where the running sum is provably too far from the boundary
/// to cross, falling back to per-bit steps near it; results are identical
/// to the per-bit scan.
FirstPassage first_passage(std::span<const std::uint64_t> bits,
                           std::size_t offset, std::size_t len,
                           std::span<const std::uint64_t> guide,
                           ScanThreshold th);

} // namespace watermark::detail
