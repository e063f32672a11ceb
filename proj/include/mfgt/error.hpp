#pragma once

#include <stdexcept>
#include <string>

namespace mfgt {

enum class ErrorCode {
  kEmptyStencil,
  kNonfiniteValue,
  kUnreachable,
  kSizeCap,
  kInfeasibleCost,
  kNotOptimalSupport,
  kCoverageGap,
  kInvalidMeasure,
  kInvalidArgument,
  kConfig,
  kDimensionMismatch,
};

// Stable identifier for an error code, e.g. "empty-stencil".
const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfgt
