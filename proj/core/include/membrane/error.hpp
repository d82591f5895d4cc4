#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace membrane {

enum class ErrorCode {
  InvalidArgument,
  NonTimelike,
  NonPositiveRadius,
  DegenerateParametrization,
  DimensionMismatch,
  NaNDetected,
  DtFloor,
  InsufficientHistory,
  ConfigError,
  WindowTooLong,
  InvariantViolation,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Every failure raised by the
/// library is one of these; the CLI maps codes onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace membrane
