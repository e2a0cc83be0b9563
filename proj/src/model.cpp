#include "watermark/model.hpp"

#include <cmath>
#include <sstream>

#include "watermark/detail/rng.hpp"

namespace watermark {

NextBitDistribution predict_next(const PredictorInterface& source,
                                 const BitString& context) {
  if (source.halted(context))
    throw SourceHaltedError(0, 0.5);
  return source.next(context);
}

void MockSourceConfig::validate() const {
  if (kind == Kind::Band &&
      !(0.0 < band_low && band_low <= band_high && band_high < 1.0))
    throw MalformedInputError("band bounds must satisfy 0 < low <= high < 1");
  if (kind == Kind::Fixed && !(0.0 <= p0_fixed && p0_fixed <= 1.0))
    throw MalformedInputError("fixed p0 must lie in [0, 1]");
  if (kind == Kind::Markov && !(0.0 < markov_stay && markov_stay < 1.0))
    throw MalformedInputError("markov_stay must lie in (0, 1)");
  if (max_steps == 0)
    throw MalformedInputError("max_steps must be positive");
}

MockSourceConfig MockSourceConfig::from_text(const std::string& text) {
  MockSourceConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw MalformedInputError("expected key=value", lineno);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "kind") {
        if (value == "fixed") cfg.kind = Kind::Fixed;
        else if (value == "band") cfg.kind = Kind::Band;
        else if (value == "markov") cfg.kind = Kind::Markov;
        else throw MalformedInputError("unknown source kind '" + value + "'",
                                       lineno);
      } else if (key == "p0") {
        cfg.p0_fixed = std::stod(value);
      } else if (key == "band_low") {
        cfg.band_low = std::stod(value);
      } else if (key == "band_high") {
        cfg.band_high = std::stod(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "markov_stay") {
        cfg.markov_stay = std::stod(value);
      } else if (key == "max_steps") {
        cfg.max_steps = std::stoull(value);
      } else {
        throw MalformedInputError("unknown config key '" + key + "'", lineno);
      }
    } catch (const MalformedInputError&) {
      throw;
    } catch (const std::exception&) {
      throw MalformedInputError("invalid value for '" + key + "'", lineno);
    }
  }
  cfg.validate();
  return cfg;
}

std::string MockSourceConfig::to_text() const {
  std::ostringstream out;
  switch (kind) {
  case Kind::Fixed:
    out << "kind=fixed\np0=" << p0_fixed << "\n";
    break;
  case Kind::Band:
    out << "kind=band\nband_low=" << band_low << "\nband_high=" << band_high
        << "\nseed=" << seed << "\n";
    break;
  case Kind::Markov:
    out << "kind=markov\nmarkov_stay=" << markov_stay << "\n";
    break;
  }
  out << "max_steps=" << max_steps << "\n";
  return out.str();
}

MockSource::MockSource(MockSourceConfig cfg) : cfg_(cfg) { cfg_.validate(); }

NextBitDistribution MockSource::next(const BitString& context) const {
  switch (cfg_.kind) {
  case MockSourceConfig::Kind::Fixed:
    return NextBitDistribution::from_p0(cfg_.p0_fixed);
  case MockSourceConfig::Kind::Band: {
    // p0 is a pure function of (seed, |context|, trailing bits), so the
    // distribution sequence varies across contexts but replays exactly.
    std::uint64_t s = cfg_.seed;
    s = detail::mix64(s ^ (0x9E3779B97F4A7C15ull * (context.size() + 1)));
    s = detail::mix64(s ^ context.tail64());
    const double u = static_cast<double>(s >> 11) * 0x1.0p-53;
    return NextBitDistribution::from_p0(cfg_.band_low +
                                        u * (cfg_.band_high - cfg_.band_low));
  }
  case MockSourceConfig::Kind::Markov: {
    if (context.empty()) return NextBitDistribution::from_p0(0.5);
    const bool last = context[context.size() - 1];
    return NextBitDistribution::from_p0(last ? 1.0 - cfg_.markov_stay
                                             : cfg_.markov_stay);
  }
  }
  throw Error("unreachable source kind");
}

bool MockSource::halted(const BitString& context) const {
  return context.size() >= cfg_.max_steps;
}

void TokenVocab::validate() const {
  if (width == 0 || width > 63)
    throw MalformedInputError("token width must lie in [1, 63]");
  if (probabilities.empty())
    throw MalformedInputError("vocabulary is empty");
  double total = 0.0;
  for (const auto& [id, p] : probabilities) {
    if (id >> width)
      throw MalformedInputError("token ID wider than declared width");
    if (p < 0.0)
      throw MalformedInputError("negative token probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 0x1.0p-40)
    throw MalformedInputError("token probabilities sum to " +
                              std::to_string(total) + ", expected 1");
}

TokenVocab TokenVocab::from_text(const std::string& text) {
  TokenVocab vocab;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string bits;
    double p;
    if (!(ls >> bits >> p))
      throw MalformedInputError("expected '<bits> <probability>'", lineno);
    if (vocab.width == 0) vocab.width = bits.size();
    if (bits.size() != vocab.width)
      throw MalformedInputError("token width differs from first token",
                                lineno);
    std::uint64_t id = 0;
    for (char c : bits) {
      if (c != '0' && c != '1')
        throw MalformedInputError("invalid token bit", lineno);
      id = (id << 1) | static_cast<std::uint64_t>(c == '1');
    }
    if (!vocab.probabilities.emplace(id, p).second)
      throw MalformedInputError("duplicate token ID", lineno);
  }
  vocab.validate();
  return vocab;
}

std::string TokenVocab::to_text() const {
  std::ostringstream out;
  for (const auto& [id, p] : probabilities) {
    for (std::size_t k = width; k-- > 0;)
      out << (((id >> k) & 1u) ? '1' : '0');
    out << ' ' << p << '\n';
  }
  return out.str();
}

namespace {

/// Mass of all tokens whose ID starts with prefix (given as value/length).
double prefix_mass(const TokenVocab& vocab, std::uint64_t prefix,
                   std::size_t prefix_len) {
  const std::size_t rest = vocab.width - prefix_len;
  double mass = 0.0;
  for (const auto& [id, p] : vocab.probabilities)
    if ((id >> rest) == prefix) mass += p;
  return mass;
}

} // namespace

NextBitDistribution token_bit_walk(const TokenVocab& vocab,
                                   const std::vector<std::uint64_t>&,
                                   const BitString& bit_prefix) {
  vocab.validate();
  if (bit_prefix.size() >= vocab.width)
    throw Error("bit prefix must be shorter than the token width");
  std::uint64_t prefix = 0;
  for (std::size_t i = 0; i < bit_prefix.size(); ++i)
    prefix = (prefix << 1) | static_cast<std::uint64_t>(bit_prefix[i]);

  const double m0 = prefix_mass(vocab, (prefix << 1) | 0u, bit_prefix.size() + 1);
  const double m1 = prefix_mass(vocab, (prefix << 1) | 1u, bit_prefix.size() + 1);
  const double total = m0 + m1;
  if (total <= 0.0)
    throw ImpossiblePrefixError("no token extends the given bit prefix");
  return NextBitDistribution::from_p0(m0 / total);
}

std::vector<std::uint64_t> decode_tokens(const BitString& bits,
                                         const TokenVocab& vocab) {
  vocab.validate();
  if (bits.size() % vocab.width != 0)
    throw DecodeError(bits.size() - bits.size() % vocab.width,
                      "trailing bits do not form a whole token");
  std::vector<std::uint64_t> tokens;
  tokens.reserve(bits.size() / vocab.width);
  for (std::size_t pos = 0; pos < bits.size(); pos += vocab.width) {
    std::uint64_t id = 0;
    for (std::size_t k = 0; k < vocab.width; ++k)
      id = (id << 1) | static_cast<std::uint64_t>(bits[pos + k]);
    if (!vocab.probabilities.count(id))
      throw DecodeError(pos, "bit chunk is not a vocabulary token");
    tokens.push_back(id);
  }
  return tokens;
}

TokenVocabSource::TokenVocabSource(TokenVocab vocab, std::size_t base_len,
                                   std::size_t max_steps)
    : vocab_(std::move(vocab)), base_len_(base_len), max_steps_(max_steps) {
  vocab_.validate();
  if (max_steps_ == 0) throw Error("max_steps must be positive");
}

NextBitDistribution TokenVocabSource::next(const BitString& context) const {
  const std::size_t emitted = context.size() - base_len_;
  const std::size_t phase = emitted % vocab_.width;
  const BitString prefix = context.substr(context.size() - phase, phase);
  return token_bit_walk(vocab_, {}, prefix);
}

bool TokenVocabSource::halted(const BitString& context) const {
  if (context.size() < base_len_) return false;
  const std::size_t emitted = context.size() - base_len_;
  // Only halt on token boundaries so emitted bits always decode.
  return emitted >= max_steps_ && emitted % vocab_.width == 0;
}

std::unique_ptr<PredictorInterface> make_source(const MockSourceConfig& cfg) {
  return std::make_unique<MockSource>(cfg);
}

} // namespace watermark
