#pragma once

#include <stdexcept>
#include <string>

namespace modquad {

enum class ErrorCode {
  kNotSkewSymmetric,
  kNonUnitAxis,
  kInvalidParams,
  kEmptyStructure,
  kOverlappingModules,
  kDegenerateStructure,
  kInapplicableDesign,
  kInvalidDof,
  kDegenerateThrust,
  kGimbalDegenerate,
  kModeMismatch,
  kNonFiniteState,
  kSingularSystem,
  kOutOfRange,
  kParseError,
  kSchemaError,
  kUnknownKey,
  kMalformedTelemetry,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modquad
