#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "watermark/singlebit.hpp"

namespace watermark {

/// Hash of a bit string truncated to `lambda` bits: SHA-256 over the
/// length-prefixed, zero-padded byte encoding of the bits (8-byte big-endian
/// bit count, then the bits MSB-first). Supports lambda up to 256.
BitString hash_bits(const BitString& data, std::uint32_t lambda);

/// One embedded block's place in a chain.
struct EmbeddedBlock {
  WatermarkSignal signal = WatermarkSignal::Bottom;
  std::size_t start = 0; // span in the chain payload, inclusive end
  std::size_t end = 0;
};

/// lambda consecutive blocks jointly carrying one hash value. Only the
/// final link of a chain may be incomplete.
struct WatermarkLink {
  std::vector<EmbeddedBlock> blocks;
  BitString signals;
  bool complete = false;
};

/// Prompt, links, and the concatenated emitted bits. Link 1's signals are
/// the hash of the prompt; link t's signals are the hash of link t-1's
/// payload bits.
struct WatermarkChain {
  BitString prompt;
  std::vector<WatermarkLink> links;
  BitString payload;

  std::size_t complete_links() const {
    std::size_t n = 0;
    for (const auto& link : links) n += link.complete ? 1 : 0;
    return n;
  }

  BitString link_payload(std::size_t index) const {
    const auto& link = links.at(index);
    return payload.substr(link.blocks.front().start,
                          link.blocks.back().end -
                              link.blocks.front().start + 1);
  }
};

/// Chain embedding: repeatedly hashes the previous link (the prompt for
/// link 1) and embeds each hash bit as one block, extending the context
/// with everything emitted, until the source halts. A block interrupted by
/// the halt contributes nothing: the chain ends at the last completed
/// block, so the final link may hold fewer than lambda blocks.
WatermarkChain uembed_chain(const SecretKey& sk, const BitString& prompt,
                            const PredictorInterface& source,
                            const SchemeConfig& cfg);

/// Payload bits only.
BitString uembed(const SecretKey& sk, const BitString& prompt,
                 const PredictorInterface& source, const SchemeConfig& cfg);

/// Scans start offsets left to right, running block detection on each
/// suffix; a successful detection is recorded (with spans rebased to the
/// input) and scanning resumes just past it, otherwise the offset advances
/// by one.
std::vector<BlockDetection> udetect(RandomStream& stream, const BitString& b,
                                    const SchemeConfig& cfg);

std::vector<BlockDetection> udetect(const SecretKey& sk, const BitString& b,
                                    const SchemeConfig& cfg);

enum class Classification { Unwatermarked, CleanPrefix, Tampered };

std::string to_string(Classification c);

/// One complete link's hash comparison.
struct LinkCheck {
  std::size_t link_index = 0; // 0-based
  BitString expected;         // hash of the predecessor
  BitString recovered;        // the link's detected signals
  bool match = false;
};

struct VerificationReport {
  bool verdict = true; // every complete-link comparison matched
  std::vector<LinkCheck> per_link;
  Classification classification = Classification::Unwatermarked;
  double coverage = 0.0; // fraction of input bits inside detected blocks
  bool truncated = false; // no complete link was available to check
};

/// Groups detections into consecutive lambda-sized links and checks each
/// complete link's signals against the hash of its predecessor (the prompt
/// first, then the previous link's detected payload bits). The trailing
/// partial link is ignored. Detections must be ordered and non-overlapping.
VerificationReport verify(const BitString& prompt,
                          const std::vector<BlockDetection>& detections,
                          const BitString& payload, std::uint32_t lambda);

} // namespace watermark
