#include "watermark/singlebit.hpp"

#include <cmath>

namespace watermark {

double SchemeConfig::negl() const {
  return static_cast<double>(std::exp(-static_cast<long double>(lambda)));
}

void SchemeConfig::validate() const {
  if (lambda < 1) throw Error("lambda must be positive");
  if (detect_exponent_scale < 1) throw Error("exponent scale must be positive");
  if (epsilon_num < 1 || epsilon_den < 1)
    throw Error("epsilon must be a positive rational");
  if (max_block_len < min_block_length(lambda))
    throw Error("max_block_len " + std::to_string(max_block_len) +
                " is below the minimum block length " +
                std::to_string(min_block_length(lambda)));
}

double hoeffding_bound(std::size_t n, double score) {
  const long double t = static_cast<long double>(score) - 0.5L;
  return static_cast<double>(
      std::exp(-2.0L * static_cast<long double>(n) * t * t));
}

std::size_t min_block_length(std::uint32_t lambda) {
  return 2 * static_cast<std::size_t>(lambda) + 1;
}

BitString embed_block(RandomStream& stream, WatermarkSignal m,
                      const PredictorInterface& source,
                      const BitString& context, const SchemeConfig& cfg,
                      EmbedTrace* trace) {
  cfg.validate();
  if (m == WatermarkSignal::Bottom)
    throw Error("embedding requires a signal of 0 or 1");

  const detail::ScanThreshold th = cfg.embed_threshold();
  BitString z = context;
  BitString block;
  std::size_t score_count = 0;
  double gap_sum = 0.0;

  for (std::size_t i = 1; i <= cfg.max_block_len; ++i) {
    if (source.halted(z))
      throw SourceHaltedError(i - 1, i > 1
                                         ? static_cast<double>(score_count) /
                                               static_cast<double>(i - 1)
                                         : 0.5);
    const NextBitDistribution dist = source.next(z);
    const UnitReal r = stream.at(i - 1);
    const bool bit = wat_sample(dist, m, r);
    block.push_back(bit);
    z.push_back(bit);
    score_count += static_cast<std::size_t>(detect_1bit(bit, r));
    gap_sum += dist.gap();

    const auto w = 2 * static_cast<std::int64_t>(score_count) -
                   static_cast<std::int64_t>(i);
    if (th.passes(i, w)) {
      if (trace)
        *trace = {i, score_count, gap_sum / static_cast<double>(i)};
      return block;
    }
  }
  throw EntropyExhaustedError(cfg.max_block_len,
                              static_cast<double>(score_count) /
                                  static_cast<double>(cfg.max_block_len));
}

BitString embed_block(const SecretKey& sk, WatermarkSignal m,
                      const PredictorInterface& source,
                      const BitString& context, const SchemeConfig& cfg,
                      EmbedTrace* trace) {
  RandomStream stream(sk);
  return embed_block(stream, m, source, context, cfg, trace);
}

BlockDetection detect_block(RandomStream& stream, const BitString& b,
                            const SchemeConfig& cfg) {
  cfg.validate();
  if (b.empty()) throw Error("detection input must be non-empty");

  const detail::ScanThreshold th = cfg.detect_threshold();
  const auto guide = stream.guide_words((b.size() + 63) / 64);
  const auto fp = detail::first_passage(b.words(), 0, b.size(), guide, th);
  if (!fp.found) return BlockDetection::bottom();

  const double score =
      static_cast<double>(fp.score_count) / static_cast<double>(fp.length);
  BlockDetection det;
  det.signal = 2 * fp.score_count > fp.length ? WatermarkSignal::One
                                              : WatermarkSignal::Zero;
  det.start = 0;
  det.end = fp.length - 1;
  det.n = fp.length;
  det.score = score;
  det.pvalue_bound = hoeffding_bound(fp.length, score);
  return det;
}

BlockDetection detect_block(const SecretKey& sk, const BitString& b,
                            const SchemeConfig& cfg) {
  RandomStream stream(sk);
  return detect_block(stream, b, cfg);
}

double block_score(RandomStream& stream, const BitString& b, std::size_t n) {
  if (n == 0 || n > b.size())
    throw Error("score length out of range");
  std::size_t S = 0;
  for (std::size_t i = 0; i < n; ++i)
    S += static_cast<std::size_t>(detect_1bit(b[i], stream.at(i)));
  return static_cast<double>(S) / static_cast<double>(n);
}

} // namespace watermark
