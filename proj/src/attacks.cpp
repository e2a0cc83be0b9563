#include "watermark/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "watermark/detail/rng.hpp"
#include "watermark/detail/stats.hpp"
#include "watermark/sampler.hpp"

namespace watermark {

namespace {

std::pair<std::size_t, std::size_t> resolve_span(const BitString& b,
                                                 const AttackSpec& spec) {
  if (spec.start > b.size())
    throw Error("attack span starts past the end of the input");
  const std::size_t len =
      spec.len == 0 ? b.size() - spec.start : spec.len;
  if (spec.start + len > b.size())
    throw Error("attack span exceeds the input");
  return {spec.start, len};
}

/// gamma distinct values from [0, n) in draw order, by partial
/// Fisher-Yates.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t gamma,
                                         detail::SplitMix& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < gamma; ++i)
    std::swap(idx[i], idx[i + rng.bounded(n - i)]);
  idx.resize(gamma);
  return idx;
}

} // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
  case AttackKind::RandomFlip:      return "random_flip";
  case AttackKind::AdversarialFlip: return "adversarial_flip";
  case AttackKind::Splice:          return "splice";
  case AttackKind::PromptSwap:      return "prompt_swap";
  case AttackKind::SingleFlip:      return "single_flip";
  }
  return "?";
}

AttackSpec AttackSpec::parse(const std::string& text) {
  AttackSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "random_flip") spec.kind = AttackKind::RandomFlip;
  else if (kind == "adversarial_flip") spec.kind = AttackKind::AdversarialFlip;
  else if (kind == "splice") spec.kind = AttackKind::Splice;
  else if (kind == "prompt_swap") spec.kind = AttackKind::PromptSwap;
  else if (kind == "single_flip") spec.kind = AttackKind::SingleFlip;
  else throw MalformedInputError("unknown attack kind '" + kind + "'");

  if (colon == std::string::npos) return spec;
  std::istringstream in(text.substr(colon + 1));
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      throw MalformedInputError("attack spec expects key=value, got '" +
                                part + "'");
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    try {
      if (key == "gamma") spec.gamma = std::stoull(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "start") spec.start = std::stoull(value);
      else if (key == "len") spec.len = std::stoull(value);
      else throw MalformedInputError("unknown attack key '" + key + "'");
    } catch (const MalformedInputError&) {
      throw;
    } catch (const std::exception&) {
      throw MalformedInputError("invalid value for attack key '" + key + "'");
    }
  }
  return spec;
}

std::string AttackSpec::to_string() const {
  std::ostringstream out;
  out << watermark::to_string(kind) << ":gamma=" << gamma << ",seed=" << seed
      << ",start=" << start << ",len=" << len;
  return out.str();
}

BitString substitution_attack(const BitString& b, const AttackSpec& spec,
                              const SecretKey* sk) {
  const auto [start, len] = resolve_span(b, spec);
  BitString out = b;
  detail::SplitMix rng(spec.seed);

  switch (spec.kind) {
  case AttackKind::PromptSwap:
    return out;

  case AttackKind::SingleFlip:
    if (spec.start >= b.size())
      throw Error("flip position out of range");
    out.flip(spec.start);
    return out;

  case AttackKind::Splice: {
    for (std::size_t i = 0; i < len; ++i)
      out.set(start + i, rng.coin());
    return out;
  }

  case AttackKind::RandomFlip: {
    if (spec.gamma > len)
      throw Error("flip budget exceeds the target span");
    for (std::size_t pos : sample_distinct(len, spec.gamma, rng))
      out.flip(start + pos);
    return out;
  }

  case AttackKind::AdversarialFlip: {
    if (spec.gamma > len)
      throw Error("flip budget exceeds the target span");
    if (!sk)
      throw Error("adversarial flips require the watermark key");
    // Score the span the way the detector would (stream restarted at the
    // span start) and split positions by agreement with the majority.
    RandomStream stream(*sk);
    std::vector<std::size_t> agree, disagree;
    std::size_t ones = 0;
    std::vector<int> scores(len);
    for (std::size_t i = 0; i < len; ++i) {
      scores[i] = detect_1bit(b[start + i], stream.at(i));
      ones += static_cast<std::size_t>(scores[i]);
    }
    const int majority = 2 * ones > len ? 1 : 0;
    for (std::size_t i = 0; i < len; ++i)
      (scores[i] == majority ? agree : disagree).push_back(i);

    std::vector<std::size_t> flips;
    if (spec.gamma <= agree.size()) {
      for (std::size_t j : sample_distinct(agree.size(), spec.gamma, rng))
        flips.push_back(agree[j]);
    } else {
      // Budget beyond the agreeing positions has to land somewhere; the
      // remainder falls on (score-restoring) minority positions.
      flips = agree;
      for (std::size_t j :
           sample_distinct(disagree.size(), spec.gamma - agree.size(), rng))
        flips.push_back(disagree[j]);
    }
    for (std::size_t pos : flips) out.flip(start + pos);
    return out;
  }
  }
  throw Error("unreachable attack kind");
}

GameOutcome robustness_forgery_game(const SecretKey& sk,
                                    const BitString& prompt,
                                    const PredictorInterface& source,
                                    std::size_t flip_position,
                                    const SchemeConfig& cfg) {
  const BitString payload = uembed(sk, prompt, source, cfg);
  if (flip_position >= payload.size())
    throw Error("flip position outside the embedded payload");
  BitString modified = payload;
  modified.flip(flip_position);

  const auto detections = udetect(sk, modified, cfg);
  GameOutcome outcome;
  outcome.report = verify(prompt, detections, modified, cfg.lambda);
  outcome.adversary_wins = outcome.report.verdict;

  std::ostringstream t;
  t << "game=robustness_forgery prompt_bits=" << prompt.size()
    << " payload_bits=" << payload.size() << " flip=" << flip_position
    << " detections=" << detections.size()
    << " verdict=" << (outcome.report.verdict ? "True" : "False")
    << " classification=" << to_string(outcome.report.classification);
  outcome.transcript = t.str();
  return outcome;
}

GameOutcome prompt_misattribution_game(const SecretKey& sk, const BitString& z,
                                       const BitString& z_prime,
                                       const PredictorInterface& source,
                                       const SchemeConfig& cfg) {
  if (z == z_prime)
    throw Error("misattribution requires a different prompt");
  const BitString payload = uembed(sk, z, source, cfg);
  const auto detections = udetect(sk, payload, cfg);

  GameOutcome outcome;
  outcome.report = verify(z_prime, detections, payload, cfg.lambda);
  outcome.adversary_wins = outcome.report.verdict;

  std::ostringstream t;
  t << "game=prompt_misattribution z_bits=" << z.size()
    << " z_prime_bits=" << z_prime.size()
    << " payload_bits=" << payload.size()
    << " detections=" << detections.size()
    << " verdict=" << (outcome.report.verdict ? "True" : "False")
    << " classification=" << to_string(outcome.report.classification);
  outcome.transcript = t.str();
  return outcome;
}

std::vector<SweepPoint> robustness_sweep(
    const SecretKey& sk, const PredictorInterface& source,
    const SchemeConfig& cfg, std::span<const double> gammas,
    std::size_t trials, std::uint64_t seed, AttackKind kind,
    GammaMode mode) {
  if (trials < 1) throw Error("sweep needs at least one trial");
  if (kind != AttackKind::RandomFlip && kind != AttackKind::AdversarialFlip)
    throw Error("sweep supports flip attacks only");

  const SchemeConfig strict = cfg;
  const SchemeConfig robust = cfg.robust();
  std::vector<SweepPoint> points;

  for (const double gamma : gammas) {
    SweepPoint strict_point{gamma, 1.0, trials, 0, 0.0, 0.0};
    SweepPoint robust_point{gamma, 0.25, trials, 0, 0.0, 0.0};
    double gap_sum = 0.0;

    for (std::size_t trial = 0; trial < trials; ++trial) {
      detail::SplitMix rng(detail::mix64(seed ^ (0x5bf0
          + 0x9E3779B97F4A7C15ull * trial)));
      BitString context;
      for (int i = 0; i < 64; ++i) context.push_back(rng.coin());
      const WatermarkSignal m = signal_from_bit(trial & 1);

      RandomStream stream(sk);
      EmbedTrace trace;
      const BitString block =
          embed_block(stream, m, source, context, strict, &trace);
      gap_sum += trace.mean_gap;

      const std::size_t n = block.size();
      const double radius =
          std::floor(std::sqrt(static_cast<double>(n) * cfg.lambda / 8.0));
      std::size_t flips = mode == GammaMode::RadiusMultiple
                              ? static_cast<std::size_t>(gamma * radius)
                              : static_cast<std::size_t>(gamma *
                                                         static_cast<double>(n));
      flips = std::min(flips, n);

      AttackSpec spec;
      spec.kind = kind;
      spec.gamma = flips;
      spec.seed = rng.next();
      const BitString attacked = substitution_attack(block, spec, &sk);

      const auto strict_det = detect_block(stream, attacked, strict);
      const auto robust_det = detect_block(stream, attacked, robust);
      strict_point.successes += strict_det.signal == m ? 1 : 0;
      robust_point.successes += robust_det.signal == m ? 1 : 0;
    }

    const double mean_gap = gap_sum / static_cast<double>(trials);
    strict_point.recovery = static_cast<double>(strict_point.successes) /
                            static_cast<double>(trials);
    robust_point.recovery = static_cast<double>(robust_point.successes) /
                            static_cast<double>(trials);
    strict_point.mean_gap = mean_gap;
    robust_point.mean_gap = mean_gap;
    points.push_back(strict_point);
    points.push_back(robust_point);
  }
  return points;
}

std::string sweep_to_table(std::span<const SweepPoint> points) {
  std::ostringstream out;
  for (const auto& p : points)
    out << p.gamma << " " << p.epsilon << " " << p.trials << " "
        << p.successes << " " << p.recovery << " " << p.mean_gap << "\n";
  return out.str();
}

double DistinguisherReport::min_p() const {
  return std::min(p_frequency, std::min(p_serial, p_chi_square));
}

DistinguisherReport battery_compare(const BitString& watermarked,
                                    const BitString& plain,
                                    std::size_t window) {
  if (window < 8) throw Error("battery window too small");
  const std::size_t n = std::min(watermarked.size(), plain.size());
  const std::size_t windows = n / window;
  if (windows < 2) throw Error("battery needs at least two windows per arm");

  // Pooled and per-position frequency.
  std::size_t ones_a = 0, ones_b = 0;
  std::vector<std::size_t> pos_a(window, 0), pos_b(window, 0);
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t k = 0; k < window; ++k) {
      const bool a = watermarked[w * window + k];
      const bool b = plain[w * window + k];
      ones_a += a;
      ones_b += b;
      pos_a[k] += a;
      pos_b[k] += b;
    }
  const std::size_t total = windows * window;
  double p_freq = detail::two_proportion_p(ones_a, total, ones_b, total);
  for (std::size_t k = 0; k < window; ++k) {
    // Bonferroni across positions.
    const double p =
        detail::two_proportion_p(pos_a[k], windows, pos_b[k], windows) *
        static_cast<double>(window);
    p_freq = std::min(p_freq, std::min(p, 1.0));
  }

  // Lag-1 serial: fraction of adjacent equal pairs within windows.
  std::size_t stay_a = 0, stay_b = 0, pairs = 0;
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t k = 0; k + 1 < window; ++k) {
      const std::size_t i = w * window + k;
      stay_a += watermarked[i] == watermarked[i + 1];
      stay_b += plain[i] == plain[i + 1];
      ++pairs;
    }
  const double p_serial =
      detail::two_proportion_p(stay_a, pairs, stay_b, pairs);

  // 16-bin chi-square over non-overlapping nibbles within windows.
  std::vector<std::size_t> hist_a(16, 0), hist_b(16, 0);
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t k = 0; k + 4 <= window; k += 4) {
      unsigned na = 0, nb = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        na = (na << 1) | static_cast<unsigned>(watermarked[w * window + k + j]);
        nb = (nb << 1) | static_cast<unsigned>(plain[w * window + k + j]);
      }
      ++hist_a[na];
      ++hist_b[nb];
    }
  const double p_chi = detail::two_sample_chi_square_p(hist_a, hist_b);

  DistinguisherReport report;
  report.p_frequency = p_freq;
  report.p_serial = p_serial;
  report.p_chi_square = p_chi;
  report.bits_per_arm = total;
  report.pass = report.min_p() >= 1e-4;
  return report;
}

DistinguisherReport distinguisher_battery(const SecretKey& sk,
                                          const MockSourceConfig& source_cfg,
                                          const SchemeConfig& cfg,
                                          std::size_t samples,
                                          std::uint64_t seed,
                                          BatteryArm arm) {
  if (samples < 10000)
    throw Error("battery needs at least 10^4 samples per arm");

  MockSourceConfig arm_cfg = source_cfg;
  arm_cfg.max_steps = samples + 64;

  // Keyed arm: every bit consumes a fresh stream position.
  arm_cfg.seed = detail::mix64(seed ^ 0xA1);
  MockSource source_a(arm_cfg);
  RandomStream stream(sk);
  BitString corpus_a;
  corpus_a.reserve(samples);
  {
    BitString context;
    for (std::size_t i = 0; i < samples; ++i) {
      const NextBitDistribution dist = source_a.next(context);
      const bool bit = arm == BatteryArm::BiasedAlwaysM
                           ? true
                           : wat_sample(dist, WatermarkSignal::One,
                                        stream.next());
      corpus_a.push_back(bit);
      context.push_back(bit);
    }
  }

  // Plain arm: same source family, fresh model seed, fresh randomness.
  arm_cfg.seed = detail::mix64(seed ^ 0xB2);
  MockSource source_b(arm_cfg);
  detail::SplitMix rng(detail::mix64(seed ^ 0xC3));
  BitString corpus_b;
  corpus_b.reserve(samples);
  {
    BitString context;
    for (std::size_t i = 0; i < samples; ++i) {
      const NextBitDistribution dist = source_b.next(context);
      const bool bit = plain_sample(dist, UnitReal{rng.next()});
      corpus_b.push_back(bit);
      context.push_back(bit);
    }
  }

  const std::size_t window = std::max<std::size_t>(32, 2 * cfg.lambda);
  return battery_compare(corpus_a, corpus_b, window);
}

} // namespace watermark
