#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace latentsearch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, malformed input file or violated precondition.
class ConfigError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public ConfigError {
  public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual)
        : ConfigError("dimension mismatch in " + what + ": expected " + std::to_string(expected) +
                      ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

  private:
    std::size_t expected_;
    std::size_t actual_;
};

/// The objective produced no usable score (non-finite value or an error reply).
///
/// `iteration()` is 0 for the initial incumbent evaluation and i for the i-th
/// proposal of a run; it is -1 when the failure happened outside a run.
class EvaluationError : public Error {
  public:
    explicit EvaluationError(const std::string& what, std::int64_t iteration = -1)
        : Error(what), iteration_(iteration) {}

    std::int64_t iteration() const noexcept { return iteration_; }

  private:
    std::int64_t iteration_;
};

/// Failure talking to an external process: timeout, malformed line, id mismatch, exit.
class TransportError : public Error {
  public:
    using Error::Error;
};

/// An internal consistency check failed. Always a bug.
class InvariantViolation : public Error {
  public:
    using Error::Error;
};

} // namespace latentsearch
