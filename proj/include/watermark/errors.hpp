#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace watermark {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two bit strings of unequal length were given to an operation that
/// requires equal operands (e.g. hamming_distance).
class LengthMismatchError : public Error {
public:
  LengthMismatchError(std::size_t lhs, std::size_t rhs)
      : Error("bit string length mismatch: " + std::to_string(lhs) + " vs " +
              std::to_string(rhs)) {}
};

/// A bit string whose length is not a whole number of bytes was given to a
/// byte-oriented conversion.
class PaddingError : public Error {
public:
  explicit PaddingError(std::size_t bits)
      : Error("bit string length " + std::to_string(bits) +
              " is not divisible by 8") {}
};

/// A conditional token mass of zero was requested during a bit walk.
class ImpossiblePrefixError : public Error {
public:
  using Error::Error;
};

/// A bit chunk did not map to any token in the vocabulary.
class DecodeError : public Error {
public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error(what + " (bit offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

/// Structured input (report, config, detection list) violated its format.
class MalformedInputError : public Error {
public:
  explicit MalformedInputError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line(line) {}
  std::size_t line;
};

/// A parameter is outside the supported range (e.g. hash width > 256).
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// Block embedding hit its length cutoff before the stopping rule was
/// satisfied. Carries the statistics at the cutoff, and the chain position
/// when raised from a chain embedding.
class EntropyExhaustedError : public Error {
public:
  EntropyExhaustedError(std::size_t steps, double score)
      : Error("entropy exhausted after " + std::to_string(steps) +
              " bits (score " + std::to_string(score) + ")"),
        steps(steps), score(score) {}

  std::size_t steps;
  double score;
  // Filled in when the failure happened inside a chain embedding.
  bool in_chain = false;
  std::size_t link_index = 0;
  std::size_t block_index = 0;
  std::size_t payload_offset = 0;
};

/// The entropy source stopped extending the context mid-block.
class SourceHaltedError : public Error {
public:
  SourceHaltedError(std::size_t steps, double score)
      : Error("source halted after " + std::to_string(steps) +
              " bits of an unfinished block"),
        steps(steps), score(score) {}
  std::size_t steps;
  double score;
};

} // namespace watermark
