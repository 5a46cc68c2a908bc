#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camcond {

enum class ErrorCode {
  BehindCamera,
  NonPositiveDepth,
  DimensionMismatch,
  EmptyMesh,
  NoBoundaryData,
  EmptyMask,
  ZeroTotalWeight,
  NonPositiveResult,
  DegenerateConfiguration,
  AllUncovered,
  LengthMismatch,
  InvalidFraction,
  InvalidSteps,
  StepOutOfRange,
  InvalidSpec,
  ShapeMismatch,
  ZeroBaseline,
  DegenerateMatch,
  MalformedHeader,
  NonFloatPayload,
  SchemaViolation,
  IoFailure,
  IndexOutOfRange,
  PortInUse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library surfaces as this exception; the
/// code is stable, the message is a human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace camcond
