#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "watermark/chain.hpp"
#include "watermark/model.hpp"

namespace watermark {

enum class AttackKind {
  RandomFlip,      // gamma uniformly chosen distinct positions
  AdversarialFlip, // gamma positions that currently support detection
  Splice,          // replace a span with foreign random bits
  PromptSwap,      // bits unchanged; the swap happens at verification
  SingleFlip       // one chosen position
};

std::string to_string(AttackKind kind);

/// Attack parameters. The target span is [start, start+len) within the
/// input; len 0 selects everything from start to the end.
struct AttackSpec {
  AttackKind kind = AttackKind::RandomFlip;
  std::size_t gamma = 0;
  std::uint64_t seed = 0;
  std::size_t start = 0;
  std::size_t len = 0;

  /// `kind:key=value,...` with keys gamma, seed, start, len.
  static AttackSpec parse(const std::string& text);
  std::string to_string() const;
};

/// Applies a substitution attack. Flip kinds change exactly gamma positions
/// inside the target span. AdversarialFlip scores the span against the
/// keyed stream (restarted at the span start) and flips positions that
/// currently agree with the majority score, driving the mean score toward
/// 1/2, the worst case inside the Hamming ball, available only to a key
/// holder; pass the key for it.
BitString substitution_attack(const BitString& b, const AttackSpec& spec,
                              const SecretKey* sk = nullptr);

/// Outcome of one forgery game. The adversary wins exactly when the
/// verifier's verdict is True.
struct GameOutcome {
  bool adversary_wins = false;
  VerificationReport report;
  std::string transcript;
};

/// Embeds a chain from the prompt, flips one payload bit, then detects and
/// verifies the modified payload against the original prompt.
GameOutcome robustness_forgery_game(const SecretKey& sk,
                                    const BitString& prompt,
                                    const PredictorInterface& source,
                                    std::size_t flip_position,
                                    const SchemeConfig& cfg);

/// Embeds a chain from z, then verifies the unmodified payload against the
/// unrelated prompt z_prime. Requires z != z_prime.
GameOutcome prompt_misattribution_game(const SecretKey& sk, const BitString& z,
                                       const BitString& z_prime,
                                       const PredictorInterface& source,
                                       const SchemeConfig& cfg);

enum class GammaMode {
  RadiusMultiple,  // gamma value scales floor(sqrt(n*lambda/8)) per block
  FractionOfLength // gamma value is a fraction of the block length
};

struct SweepPoint {
  double gamma = 0.0;   // as given, in the chosen mode
  double epsilon = 1.0; // detection relax exponent
  std::size_t trials = 0;
  std::size_t successes = 0;
  double recovery = 0.0;
  double mean_gap = 0.0;
};

/// For each gamma: embeds a block on a fresh random context, attacks it,
/// and re-detects at epsilon 1 and 1/4, reporting the recovery rate and the
/// mean realized per-block gap.
std::vector<SweepPoint> robustness_sweep(
    const SecretKey& sk, const PredictorInterface& source,
    const SchemeConfig& cfg, std::span<const double> gammas,
    std::size_t trials, std::uint64_t seed,
    AttackKind kind = AttackKind::AdversarialFlip,
    GammaMode mode = GammaMode::RadiusMultiple);

/// `gamma epsilon trials successes recovery mean_gap` per line.
std::string sweep_to_table(std::span<const SweepPoint> points);

struct DistinguisherReport {
  double p_frequency = 1.0;
  double p_serial = 1.0;
  double p_chi_square = 1.0;
  std::size_t bits_per_arm = 0;
  bool pass = false; // no test below significance 1e-4

  double min_p() const;
};

enum class BatteryArm {
  Dits,         // watermark sampling under test
  BiasedAlwaysM // positive control: the sampler emits the signal verbatim
};

/// Necessary-condition undetectability battery: generates a keyed-sampling
/// corpus and a plain-sampling corpus over like sources (fresh model seeds
/// per arm), then compares them with per-position/pooled frequency, lag-1
/// serial, and 16-bin pattern chi-square tests on block-sized windows.
/// The keyed arm consumes consecutive stream positions, never reusing one,
/// so the comparison isolates the sampling primitive.
DistinguisherReport distinguisher_battery(const SecretKey& sk,
                                          const MockSourceConfig& source_cfg,
                                          const SchemeConfig& cfg,
                                          std::size_t samples,
                                          std::uint64_t seed,
                                          BatteryArm arm = BatteryArm::Dits);

/// The battery's comparison stage on two prepared corpora.
DistinguisherReport battery_compare(const BitString& watermarked,
                                    const BitString& plain,
                                    std::size_t window);

} // namespace watermark
