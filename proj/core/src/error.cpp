#include "membrane/error.hpp"

namespace membrane {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonTimelike: return "NonTimelike";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::DegenerateParametrization: return "DegenerateParametrization";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NaNDetected: return "NaNDetected";
    case ErrorCode::DtFloor: return "DtFloor";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace membrane
