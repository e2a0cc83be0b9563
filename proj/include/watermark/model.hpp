#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "watermark/bits.hpp"
#include "watermark/randomness.hpp"

namespace watermark {

/// A probability in [0, 1] as a 64-bit fixed-point fraction with an exact
/// representation of 1. Comparison against UnitReal is an exact integer
/// comparison, so sampling decisions are deterministic and portable.
class Probability {
public:
  Probability() = default;

  static Probability zero() { return Probability(0, false); }
  static Probability one() { return Probability(0, true); }
  static Probability from_fraction(std::uint64_t f) {
    return Probability(f, false);
  }

  static Probability from_double(double p) {
    if (p <= 0.0) return zero();
    if (p >= 1.0) return one();
    // long double keeps the full 64 fractional bits on x86.
    const long double scaled = static_cast<long double>(p) * 0x1.0p64L;
    auto f = static_cast<std::uint64_t>(scaled);
    return Probability(f, false);
  }

  bool is_one() const { return one_; }
  bool is_zero() const { return !one_ && frac_ == 0; }
  std::uint64_t fraction() const { return frac_; }

  double to_double() const {
    return one_ ? 1.0 : static_cast<double>(frac_) * 0x1.0p-64;
  }

  /// Exact 1 - p.
  Probability complement() const {
    if (one_) return zero();
    if (frac_ == 0) return one();
    return Probability(0 - frac_, false);
  }

  bool operator==(const Probability&) const = default;

private:
  Probability(std::uint64_t frac, bool one) : frac_(frac), one_(one) {}
  std::uint64_t frac_ = 0;
  bool one_ = false;
};

/// r < p, exactly.
inline bool operator<(UnitReal r, Probability p) {
  return p.is_one() || r.raw < p.fraction();
}

/// Distribution of the next bit. p0 + p1 = 1 exactly by construction.
struct NextBitDistribution {
  Probability p0;
  Probability p1;

  static NextBitDistribution from_p0(Probability p0) {
    return {p0, p0.complement()};
  }
  static NextBitDistribution from_p0(double p0) {
    return from_p0(Probability::from_double(p0));
  }

  /// min(p0, p1) as a double: the per-step score margin this distribution
  /// contributes to detection.
  double gap() const {
    const double a = p0.to_double();
    return a < 0.5 ? a : 1.0 - a;
  }
};

/// Deterministic next-bit model: same context, same distribution. `halted`
/// reports whether the source declines to extend the given context.
class PredictorInterface {
public:
  virtual ~PredictorInterface() = default;
  virtual NextBitDistribution next(const BitString& context) const = 0;
  virtual bool halted(const BitString& context) const = 0;
};

/// Distribution of the next bit, with the halt contract enforced.
NextBitDistribution predict_next(const PredictorInterface& source,
                                 const BitString& context);

/// Configuration for the mock entropy sources used in desk-scale
/// experiments in place of a real language model.
struct MockSourceConfig {
  enum class Kind { Fixed, Band, Markov };

  Kind kind = Kind::Band;
  double p0_fixed = 0.5;    // Fixed
  double band_low = 0.35;   // Band: p0 drawn per context from [low, high]
  double band_high = 0.65;
  std::uint64_t seed = 0;   // Band: public model seed, independent of sk
  double markov_stay = 0.7; // Markov: P(next bit == previous bit)
  std::size_t max_steps = 4096; // halt once the context reaches this length

  void validate() const;

  /// key=value lines; unknown keys rejected with a line diagnostic.
  static MockSourceConfig from_text(const std::string& text);
  std::string to_text() const;
};

/// Mock source. Band kind derives p0 deterministically from (seed, context
/// length, trailing context bits), so distinct contexts explore distinct
/// distribution sequences while replays are exact.
class MockSource final : public PredictorInterface {
public:
  explicit MockSource(MockSourceConfig cfg);

  NextBitDistribution next(const BitString& context) const override;
  bool halted(const BitString& context) const override;

  const MockSourceConfig& config() const { return cfg_; }

private:
  MockSourceConfig cfg_;
};

/// Fixed-width token vocabulary: every token ID is `width` bits and the
/// probabilities sum to 1 within 2^-40.
struct TokenVocab {
  std::size_t width = 0;
  std::map<std::uint64_t, double> probabilities; // token ID -> mass

  void validate() const;

  /// One line per token: `<bits> <probability>`.
  static TokenVocab from_text(const std::string& text);
  std::string to_text() const;
};

/// Conditional next-bit distribution of the token whose ID extends
/// bit_prefix: p0 is the mass of IDs extending prefix||0 over the mass of
/// IDs extending prefix. Throws ImpossiblePrefixError on zero mass.
NextBitDistribution token_bit_walk(const TokenVocab& vocab,
                                   const std::vector<std::uint64_t>& token_context,
                                   const BitString& bit_prefix);

/// Splits bits into width-sized chunks and maps each to its token ID.
/// Throws DecodeError (with the bit offset) for chunks outside the vocab.
std::vector<std::uint64_t> decode_tokens(const BitString& bits,
                                         const TokenVocab& vocab);

/// PredictorInterface over a token vocabulary: each model step walks one
/// bit of the current partial token ID. Tokens are drawn i.i.d. from the
/// vocabulary. `base_len` is the context length at which generation starts
/// (the prompt is not part of the token stream); the source halts at the
/// first token boundary at or past max_steps generated bits.
class TokenVocabSource final : public PredictorInterface {
public:
  TokenVocabSource(TokenVocab vocab, std::size_t base_len,
                   std::size_t max_steps);

  NextBitDistribution next(const BitString& context) const override;
  bool halted(const BitString& context) const override;

private:
  TokenVocab vocab_;
  std::size_t base_len_;
  std::size_t max_steps_;
};

/// Builds the configured mock source; for Kind-driven call sites that do
/// not care which concrete class they get.
std::unique_ptr<PredictorInterface> make_source(const MockSourceConfig& cfg);

} // namespace watermark
