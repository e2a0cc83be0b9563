#pragma once

#include "watermark/model.hpp"

namespace watermark {

// Dual inverse transform sampling: the two mirror-image arrangements of the
// unit interval below both realize the marginal (p0, p1), so the output
// distribution is independent of the signal, while a holder of r can read
// the arrangement back out.
//
//   signal 0:  [0, p1) -> 1   [p1, 1) -> 0
//   signal 1:  [0, p0) -> 0   [p0, 1) -> 1
//
// Boundary comparisons are strict; UnitReal lives in [0, 1), so a
// zero-entropy distribution forces the same bit under either signal.

/// Samples one bit from `dist` under watermark signal m in {Zero, One}.
inline bool wat_sample(const NextBitDistribution& dist, WatermarkSignal m,
                       UnitReal r) {
  if (m == WatermarkSignal::Bottom)
    throw Error("embedding requires a signal of 0 or 1");
  if (m == WatermarkSignal::Zero)
    return r < dist.p1;
  return !(r < dist.p0);
}

/// Per-bit detector: 1(r < 1/2) XOR b. With the arrangements above this
/// recovers the signal exactly at p = 1/2 and errs with probability
/// max(p0, p1) - 1/2 otherwise.
inline int detect_1bit(bool b, UnitReal r) {
  return static_cast<int>(r.below_half()) ^ static_cast<int>(b);
}

/// Signal-free inverse transform sampling over the fixed arrangement
/// [0, p0) -> 0, [p0, 1) -> 1.
inline bool plain_sample(const NextBitDistribution& dist, UnitReal r) {
  return !(r < dist.p0);
}

} // namespace watermark
