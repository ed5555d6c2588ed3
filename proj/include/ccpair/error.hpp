#pragma once

#include <stdexcept>
#include <string>

namespace ccpair {

enum class ErrorCode {
  kInvalidArgument,
  kNoEquilibrium,
  kZeroGradient,
  kLinearizationInvalid,
  kPole,
  kIntegrationFailure,
  kUndefinedMetric,
  kDegenerate,
  kConfig,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNoEquilibrium: return "no interior equilibrium";
    case ErrorCode::kZeroGradient: return "zero range-policy gradient";
    case ErrorCode::kLinearizationInvalid: return "linearization invalid";
    case ErrorCode::kPole: return "pole";
    case ErrorCode::kIntegrationFailure: return "integration failure";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccpair
