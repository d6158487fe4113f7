#include "modquad/error.hpp"

namespace modquad {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorCode::kNonUnitAxis: return "NonUnitAxis";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kEmptyStructure: return "EmptyStructure";
    case ErrorCode::kOverlappingModules: return "OverlappingModules";
    case ErrorCode::kDegenerateStructure: return "DegenerateStructure";
    case ErrorCode::kInapplicableDesign: return "InapplicableDesign";
    case ErrorCode::kInvalidDof: return "InvalidDOF";
    case ErrorCode::kDegenerateThrust: return "DegenerateThrust";
    case ErrorCode::kGimbalDegenerate: return "GimbalDegenerate";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kMalformedTelemetry: return "MalformedTelemetry";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace modquad
