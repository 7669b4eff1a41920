#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace physarum {

enum class ErrorCode {
  // model
  DimensionMismatch,
  RankDeficient,
  NonPositiveCost,
  ExactTooLarge,
  // linalg / dynamics
  NotPositiveDefinite,
  NonPositiveState,
  NotInKernel,
  // discrete solver
  BadEps,
  BadStep,
  NoFeasibleInteriorStart,
  PositivityLost,
  MissingVerifyData,
  // continuous flow
  StepSizeUnderflow,
  InsufficientTrace,
  // entropy path
  InfeasibleStart,
  Overflow,
  NewtonStalled,
  BadGrid,
  // oracle
  TooLarge,
  NoInteriorPoint,
  Infeasible,
  // io
  Io,
  Malformed,
  ValidationFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  /// Wraps a lower-level failure, e.g. ValidationFailed caused by NonPositiveCost.
  Error(ErrorCode code, ErrorCode cause, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), cause_(cause) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<ErrorCode> cause() const noexcept { return cause_; }

 private:
  ErrorCode code_;
  std::optional<ErrorCode> cause_;
};

}  // namespace physarum
