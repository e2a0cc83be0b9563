#pragma once

#include <cstdint>

#include "watermark/detail/scan.hpp"
#include "watermark/model.hpp"
#include "watermark/randomness.hpp"
#include "watermark/sampler.hpp"

namespace watermark {

/// Scheme parameters. The detection threshold is negl^epsilon with
/// negl = e^(-lambda); epsilon is a rational (1 strict, 1/4 robust mode)
/// and applies to detection only; embedding always stops at the strict
/// threshold so detection on unmodified output reproduces block boundaries
/// exactly.
struct SchemeConfig {
  std::uint32_t lambda = 16;
  std::uint32_t detect_exponent_scale = 2; // c in exp(-c*n*(X-1/2)^2)
  std::uint32_t epsilon_num = 1;           // detection relax exponent
  std::uint32_t epsilon_den = 1;
  std::size_t max_block_len = 4096;

  static SchemeConfig for_lambda(std::uint32_t lambda) {
    SchemeConfig cfg;
    cfg.lambda = lambda;
    const std::size_t min_len = 2 * static_cast<std::size_t>(lambda) + 1;
    if (cfg.max_block_len < min_len) cfg.max_block_len = min_len;
    return cfg;
  }

  /// Copy with the robust-mode detection exponent 1/4.
  SchemeConfig robust() const {
    SchemeConfig cfg = *this;
    cfg.epsilon_num = 1;
    cfg.epsilon_den = 4;
    return cfg;
  }

  /// e^(-lambda), evaluated in extended precision.
  double negl() const;

  void validate() const;

  /// Integer form of the detection threshold (uses epsilon).
  detail::ScanThreshold detect_threshold() const {
    return {static_cast<std::uint64_t>(detect_exponent_scale) * epsilon_den,
            4ull * lambda * epsilon_num};
  }

  /// Integer form of the embedding stopping rule (epsilon fixed at 1).
  detail::ScanThreshold embed_threshold() const {
    return {static_cast<std::uint64_t>(detect_exponent_scale),
            4ull * lambda};
  }
};

/// One detected watermark block: its signal, span (0-based, inclusive end),
/// length, mean detector score, and the bound exp(-2n(X-1/2)^2) on the
/// probability of seeing such a score on unwatermarked input.
struct BlockDetection {
  WatermarkSignal signal = WatermarkSignal::Bottom;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t n = 0;
  double score = 0.5;
  double pvalue_bound = 1.0;

  bool found() const { return signal != WatermarkSignal::Bottom; }

  static BlockDetection bottom() { return {}; }
};

/// exp(-2*n*(score - 1/2)^2).
double hoeffding_bound(std::size_t n, double score);

/// Smallest block length whose bound can beat e^(-lambda): 2*lambda + 1.
std::size_t min_block_length(std::uint32_t lambda);

/// Per-step record of an embedding, for experiment harnesses.
struct EmbedTrace {
  std::size_t length = 0;
  std::size_t score_count = 0; // sum of per-bit detector outputs
  double mean_gap = 0.0;       // mean of min(p0, p1) over the block
};

/// Embeds one watermark block: samples bits through wat_sample with the
/// keyed stream restarted at position 0, extending the context bit by bit,
/// until the running score first satisfies the strict stopping rule.
/// Throws EntropyExhaustedError when max_block_len is reached first and
/// SourceHaltedError when the source stops extending the context mid-block.
BitString embed_block(RandomStream& stream, WatermarkSignal m,
                      const PredictorInterface& source,
                      const BitString& context, const SchemeConfig& cfg,
                      EmbedTrace* trace = nullptr);

BitString embed_block(const SecretKey& sk, WatermarkSignal m,
                      const PredictorInterface& source,
                      const BitString& context, const SchemeConfig& cfg,
                      EmbedTrace* trace = nullptr);

/// Scans prefixes of b against the keyed stream (from position 0) and
/// returns the block ending at the first prefix whose bound beats
/// negl^epsilon, with signal One when X > 1/2 and Zero when X < 1/2.
/// Returns a Bottom detection when no prefix passes.
BlockDetection detect_block(RandomStream& stream, const BitString& b,
                            const SchemeConfig& cfg);

BlockDetection detect_block(const SecretKey& sk, const BitString& b,
                            const SchemeConfig& cfg);

/// Detector score over exactly the first n bits of b (no stopping rule):
/// the fraction of per-bit detector outputs equal to one.
double block_score(RandomStream& stream, const BitString& b, std::size_t n);

} // namespace watermark
