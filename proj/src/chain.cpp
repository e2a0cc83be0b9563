#include "watermark/chain.hpp"

#include "watermark/detail/crypto.hpp"

namespace watermark {

BitString hash_bits(const BitString& data, std::uint32_t lambda) {
  if (lambda > 256)
    throw UnsupportedError("hash width above 256 bits is unsupported");
  if (lambda == 0)
    throw UnsupportedError("hash width must be positive");

  // 8-byte big-endian bit count, then the bits packed MSB-first with zero
  // padding: distinct bit strings map to distinct byte messages.
  std::vector<std::uint8_t> msg(8 + (data.size() + 7) / 8, 0);
  const auto n = static_cast<std::uint64_t>(data.size());
  for (int i = 0; i < 8; ++i)
    msg[i] = static_cast<std::uint8_t>(n >> (56 - 8 * i));
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i]) msg[8 + i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));

  const auto digest = detail::sha256(msg);
  BitString out;
  out.reserve(lambda);
  for (std::size_t i = 0; i < lambda; ++i)
    out.push_back((digest[i / 8] >> (7 - i % 8)) & 1u);
  return out;
}

WatermarkChain uembed_chain(const SecretKey& sk, const BitString& prompt,
                            const PredictorInterface& source,
                            const SchemeConfig& cfg) {
  cfg.validate();
  if (prompt.empty()) throw Error("prompt must be non-empty");
  if (source.halted(prompt)) throw SourceHaltedError(0, 0.5);

  RandomStream stream(sk);
  WatermarkChain chain;
  chain.prompt = prompt;

  BitString context = prompt;
  BitString prev = prompt;
  bool halted = false;

  while (!halted) {
    const BitString h = hash_bits(prev, cfg.lambda);
    WatermarkLink link;
    BitString link_payload;

    for (std::size_t i = 0; i < cfg.lambda; ++i) {
      if (source.halted(context)) {
        halted = true;
        break;
      }
      const WatermarkSignal m = signal_from_bit(h[i]);
      const std::size_t start = chain.payload.size();
      BitString block;
      try {
        block = embed_block(stream, m, source, context, cfg);
      } catch (const SourceHaltedError&) {
        // The unfinished block carries no guarantee; drop its bits.
        halted = true;
        break;
      } catch (EntropyExhaustedError& e) {
        e.in_chain = true;
        e.link_index = chain.links.size();
        e.block_index = i;
        e.payload_offset = start;
        throw;
      }
      context.append(block);
      link_payload.append(block);
      chain.payload.append(block);
      link.blocks.push_back({m, start, chain.payload.size() - 1});
      link.signals.push_back(h[i]);
    }

    link.complete = link.blocks.size() == cfg.lambda;
    if (!link.blocks.empty()) chain.links.push_back(std::move(link));
    prev = link_payload;
  }
  return chain;
}

BitString uembed(const SecretKey& sk, const BitString& prompt,
                 const PredictorInterface& source, const SchemeConfig& cfg) {
  return uembed_chain(sk, prompt, source, cfg).payload;
}

std::vector<BlockDetection> udetect(RandomStream& stream, const BitString& b,
                                    const SchemeConfig& cfg) {
  cfg.validate();
  std::vector<BlockDetection> out;
  if (b.empty()) return out;

  const detail::ScanThreshold th = cfg.detect_threshold();
  const std::size_t min_len = th.min_passing_length();
  const auto guide = stream.guide_words((b.size() + 63) / 64);

  std::size_t offset = 0;
  while (offset + min_len <= b.size()) {
    const auto fp =
        detail::first_passage(b.words(), offset, b.size() - offset, guide, th);
    if (!fp.found) {
      ++offset;
      continue;
    }
    const double score =
        static_cast<double>(fp.score_count) / static_cast<double>(fp.length);
    BlockDetection det;
    det.signal = 2 * fp.score_count > fp.length ? WatermarkSignal::One
                                                : WatermarkSignal::Zero;
    det.start = offset;
    det.end = offset + fp.length - 1;
    det.n = fp.length;
    det.score = score;
    det.pvalue_bound = hoeffding_bound(fp.length, score);
    out.push_back(det);
    offset += fp.length;
  }
  return out;
}

std::vector<BlockDetection> udetect(const SecretKey& sk, const BitString& b,
                                    const SchemeConfig& cfg) {
  RandomStream stream(sk);
  return udetect(stream, b, cfg);
}

std::string to_string(Classification c) {
  switch (c) {
  case Classification::Unwatermarked: return "unwatermarked";
  case Classification::CleanPrefix:   return "clean-prefix";
  case Classification::Tampered:      return "tampered";
  }
  return "?";
}

VerificationReport verify(const BitString& prompt,
                          const std::vector<BlockDetection>& detections,
                          const BitString& payload, std::uint32_t lambda) {
  if (lambda == 0) throw Error("lambda must be positive");

  std::size_t covered = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (!d.found() || d.n == 0 || d.end != d.start + d.n - 1)
      throw MalformedInputError("detection " + std::to_string(i) +
                                " is malformed");
    if (d.end >= payload.size())
      throw MalformedInputError("detection " + std::to_string(i) +
                                " exceeds the payload");
    if (i > 0 && d.start <= detections[i - 1].end)
      throw MalformedInputError("detections overlap or are out of order at " +
                                std::to_string(i));
    covered += d.n;
  }

  VerificationReport report;
  report.coverage = payload.empty()
                        ? 0.0
                        : static_cast<double>(covered) /
                              static_cast<double>(payload.size());

  if (detections.empty()) {
    report.verdict = true;
    report.truncated = true;
    report.classification = Classification::Unwatermarked;
    return report;
  }

  const std::size_t full_links = detections.size() / lambda;
  BitString prev = prompt;
  for (std::size_t t = 0; t < full_links; ++t) {
    LinkCheck check;
    check.link_index = t;
    check.expected = hash_bits(prev, lambda);
    BitString link_bits;
    for (std::size_t j = 0; j < lambda; ++j) {
      const auto& d = detections[t * lambda + j];
      check.recovered.push_back(d.signal == WatermarkSignal::One);
      link_bits.append(payload.substr(d.start, d.n));
    }
    check.match = check.expected == check.recovered;
    report.verdict = report.verdict && check.match;
    report.per_link.push_back(std::move(check));
    prev = link_bits;
  }
  report.truncated = full_links == 0;

  if (covered == payload.size() && report.verdict)
    report.classification = Classification::CleanPrefix;
  else
    report.classification = Classification::Tampered;
  return report;
}

} // namespace watermark
