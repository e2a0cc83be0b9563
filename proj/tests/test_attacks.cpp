#include <doctest.h>

#include <cmath>

#include "watermark/attacks.hpp"
#include "watermark/detail/rng.hpp"
#include "watermark/detail/stats.hpp"

using namespace watermark;

namespace {

SecretKey test_key(std::uint8_t fill = 0x91, std::uint32_t lambda = 16) {
  return keygen(lambda, std::vector<std::uint8_t>(32, fill));
}

MockSourceConfig band_cfg(std::uint64_t seed, std::size_t max_steps) {
  MockSourceConfig cfg;
  cfg.kind = MockSourceConfig::Kind::Band;
  cfg.band_low = 0.35;
  cfg.band_high = 0.65;
  cfg.seed = seed;
  cfg.max_steps = max_steps;
  return cfg;
}

BitString random_bits(detail::SplitMix& rng, std::size_t n) {
  BitString out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.coin());
  return out;
}

} // namespace

TEST_CASE("gammq against frozen chi-square table points") {
  // chi-square upper tails, 15 dof: 25.0 -> ~0.050, 30.578 -> ~0.010
  CHECK(detail::chi_square_tail(25.0, 15) ==
        doctest::Approx(0.0499).epsilon(0.01));
  CHECK(detail::chi_square_tail(30.578, 15) ==
        doctest::Approx(0.010).epsilon(0.01));
  CHECK(detail::chi_square_tail(0.0, 15) == doctest::Approx(1.0));
  // 1 dof tail equals the two-sided normal tail of sqrt(x)
  CHECK(detail::chi_square_tail(4.0, 1) ==
        doctest::Approx(detail::two_sided_p(2.0)).epsilon(1e-10));
}

TEST_CASE("attack spec parsing") {
  const auto spec =
      AttackSpec::parse("random_flip:gamma=10,seed=42,start=5,len=100");
  CHECK(spec.kind == AttackKind::RandomFlip);
  CHECK(spec.gamma == 10);
  CHECK(spec.seed == 42);
  CHECK(spec.start == 5);
  CHECK(spec.len == 100);
  CHECK(AttackSpec::parse("prompt_swap").kind == AttackKind::PromptSwap);
  CHECK_THROWS_AS(AttackSpec::parse("warp:gamma=1"), MalformedInputError);
  CHECK_THROWS_AS(AttackSpec::parse("splice:speed=1"), MalformedInputError);
  const auto back = AttackSpec::parse(spec.to_string());
  CHECK(back.gamma == spec.gamma);
  CHECK(back.seed == spec.seed);
}

TEST_CASE("substitution attack stays inside the declared Hamming ball") {
  detail::SplitMix rng(3001);
  const BitString input = random_bits(rng, 500);

  AttackSpec spec;
  spec.kind = AttackKind::RandomFlip;
  spec.gamma = 0;
  CHECK(substitution_attack(input, spec) == input);

  spec.gamma = input.size();
  spec.seed = 7;
  CHECK(hamming_distance(substitution_attack(input, spec), input) ==
        input.size());

  for (std::size_t gamma : {1ul, 17ul, 250ul}) {
    spec.gamma = gamma;
    spec.seed = rng.next();
    CHECK(hamming_distance(substitution_attack(input, spec), input) == gamma);
  }

  spec.gamma = 501;
  CHECK_THROWS_AS(substitution_attack(input, spec), Error);

  AttackSpec flip;
  flip.kind = AttackKind::SingleFlip;
  flip.start = 33;
  const auto flipped = substitution_attack(input, flip);
  CHECK(hamming_distance(flipped, input) == 1);
  CHECK(flipped[33] != input[33]);
}

TEST_CASE("adversarial flips drive the score toward one half") {
  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  detail::SplitMix rng(3011);
  const MockSource source(band_cfg(617, 1 << 20));
  const auto context = random_bits(rng, 64);

  RandomStream stream(sk);
  EmbedTrace trace;
  const BitString block = embed_block(stream, WatermarkSignal::One, source,
                                      context, cfg, &trace);
  const std::size_t n = block.size();
  const double x0 = block_score(stream, block, n);

  AttackSpec spec;
  spec.kind = AttackKind::AdversarialFlip;
  spec.gamma = n / 4;
  spec.seed = 99;
  CHECK_THROWS_AS(substitution_attack(block, spec), Error); // needs the key
  const BitString attacked = substitution_attack(block, spec, &sk);
  CHECK(hamming_distance(attacked, block) == spec.gamma);

  // every flip lands on an agreeing position, so the shift is exactly
  // gamma/n toward 1/2
  const double x1 = block_score(stream, attacked, n);
  CHECK(x1 == doctest::Approx(x0 - static_cast<double>(spec.gamma) /
                                       static_cast<double>(n))
                  .epsilon(1e-12));
}

TEST_CASE("robustness forgery game outcomes by flip location") {
  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  detail::SplitMix rng(3019);
  const auto prompt = random_bits(rng, 96);
  const MockSource source(band_cfg(2718, prompt.size() + 9000));

  const WatermarkChain chain = uembed_chain(sk, prompt, source, cfg);
  REQUIRE(chain.complete_links() >= 3);

  // flips inside link 1 of a 3-complete-link chain lose
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t pos =
        rng.bounded(chain.links[0].blocks.back().end + 1);
    const auto outcome =
        robustness_forgery_game(sk, prompt, source, pos, cfg);
    CHECK_FALSE(outcome.adversary_wins);
  }

  // flips confined to the trailing partial link leave every complete-link
  // comparison intact, so the adversary wins
  if (!chain.links.back().complete) {
    const std::size_t pos = chain.links.back().blocks.front().start;
    const auto outcome =
        robustness_forgery_game(sk, prompt, source, pos, cfg);
    CHECK(outcome.adversary_wins);
    CHECK(outcome.report.verdict);
  }

  // transcripts replay deterministically
  const auto a = robustness_forgery_game(sk, prompt, source, 5, cfg);
  const auto b = robustness_forgery_game(sk, prompt, source, 5, cfg);
  CHECK(a.adversary_wins == b.adversary_wins);
  CHECK(a.transcript == b.transcript);
}

TEST_CASE("prompt misattribution loses without a hash collision") {
  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  detail::SplitMix rng(3023);

  for (int trial = 0; trial < 20; ++trial) {
    const auto z = random_bits(rng, 96);
    BitString z_prime = z;
    z_prime.flip(rng.bounded(z.size()));
    const MockSource source(band_cfg(rng.next(), z.size() + 4000));
    const auto outcome =
        prompt_misattribution_game(sk, z, z_prime, source, cfg);
    const bool collision =
        hash_bits(z, cfg.lambda) == hash_bits(z_prime, cfg.lambda);
    CHECK(outcome.adversary_wins == collision);
  }

  const auto z = random_bits(rng, 64);
  const MockSource source(band_cfg(1, z.size() + 2000));
  CHECK_THROWS_AS(prompt_misattribution_game(sk, z, z, source, cfg), Error);
}

TEST_CASE("robustness sweep shape and endpoints") {
  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  const MockSource source(band_cfg(8808, 1 << 20));

  const double gammas[] = {0.0, 1.0, 4.0};
  const auto points = robustness_sweep(sk, source, cfg, gammas, 40, 90210,
                                       AttackKind::AdversarialFlip,
                                       GammaMode::RadiusMultiple);
  REQUIRE(points.size() == 6); // two epsilons per gamma

  // gamma = 0: perfect recovery at both epsilons
  CHECK(points[0].recovery == doctest::Approx(1.0));
  CHECK(points[1].recovery == doctest::Approx(1.0));
  CHECK(points[0].mean_gap > 0.3);

  // recovery does not improve as gamma grows (per epsilon)
  CHECK(points[2].recovery <= points[0].recovery + 0.02);
  CHECK(points[4].recovery <= points[2].recovery + 0.02);
  CHECK(points[5].recovery <= points[3].recovery + 0.02);

  const auto table = sweep_to_table(points);
  CHECK(table.find("0 1 40") != std::string::npos);

  // half the block randomly flipped: recovery collapses to chance
  const double half[] = {0.5};
  const auto chance = robustness_sweep(sk, source, cfg, half, 40, 90211,
                                       AttackKind::RandomFlip,
                                       GammaMode::FractionOfLength);
  CHECK(chance[1].recovery < 0.8); // epsilon 1/4 row
}

TEST_CASE("distinguisher battery passes on honest sampling") {
  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  const auto report =
      distinguisher_battery(sk, band_cfg(4, 0), cfg, 20000, 424242);
  CHECK(report.pass);
  CHECK(report.p_frequency >= 1e-4);
  CHECK(report.p_serial >= 1e-4);
  CHECK(report.p_chi_square >= 1e-4);
  CHECK_THROWS_AS(distinguisher_battery(sk, band_cfg(4, 0), cfg, 100, 1),
                  Error);
}

TEST_CASE("distinguisher battery null case and positive control") {
  detail::SplitMix rng(3041);
  const BitString corpus = random_bits(rng, 20000);
  const auto null_report = battery_compare(corpus, corpus, 32);
  CHECK(null_report.pass);
  CHECK(null_report.p_frequency == doctest::Approx(1.0));

  const auto sk = test_key();
  const auto cfg = SchemeConfig::for_lambda(16);
  const auto biased = distinguisher_battery(sk, band_cfg(4, 0), cfg, 20000,
                                            424242, BatteryArm::BiasedAlwaysM);
  CHECK_FALSE(biased.pass);
  CHECK(biased.p_frequency < 1e-4);
}
