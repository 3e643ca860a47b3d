#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace istab {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteInput,
  NonFiniteOutput,
  NonSquareMatrix,
  NegativeEntry,
  InvalidArgument,
  NoConvergence,
  DimensionTooLarge,
  ClosureTooLarge,
  EnumerationCapExceeded,
  NegativeDelay,
  DelayExceedsBound,
  ScheduleError,
  ConfigError,
};

const char* to_string(ErrorCode code);

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An evaluator failure observed while iterating; carries the step at which it
/// happened (step k means the map was applied to state k-1).
class EvaluationError : public Error {
 public:
  EvaluationError(ErrorCode code, const std::string& what, std::size_t step)
      : Error(code, what + " (at step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(std::size_t iterations, double previous, double last)
      : Error(ErrorCode::NoConvergence,
              "power iteration did not converge after " +
                  std::to_string(iterations) + " iterations (last estimates " +
                  std::to_string(previous) + ", " + std::to_string(last) + ")"),
        iterations_(iterations),
        previous_(previous),
        last_(last) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double previous_estimate() const noexcept { return previous_; }
  double last_estimate() const noexcept { return last_; }

 private:
  std::size_t iterations_;
  double previous_;
  double last_;
};

}  // namespace istab
