#pragma once

#include <optional>
#include <string>

#include "watermark/chain.hpp"

namespace watermark {

/// Line-oriented chain report. A detection run writes the header and one
/// record per detected block; verification appends per-link comparison
/// lines, the verdict, the classification and the coverage. Floating-point
/// fields are printed with round-trip precision so reports are bit-exact.
struct ChainReport {
  std::uint32_t lambda = 0;
  std::string key_fingerprint;
  std::size_t payload_bits = 0;
  std::vector<BlockDetection> detections;
  std::optional<VerificationReport> verification;
};

std::string report_to_text(const ChainReport& report);
ChainReport report_from_text(const std::string& text);

} // namespace watermark
