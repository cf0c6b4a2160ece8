#include "rhocalc/errors.hpp"

namespace rhocalc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::NegativePower: return "NegativePower";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::TruncationRequired: return "TruncationRequired";
    case ErrorCode::UnsupportedConstantPart: return "UnsupportedConstantPart";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GradingViolation: return "GradingViolation";
    case ErrorCode::MixedParity: return "MixedParity";
    case ErrorCode::NonzeroDegree: return "NonzeroDegree";
    case ErrorCode::NotSplitTuple: return "NotSplitTuple";
    case ErrorCode::NotHomological: return "NotHomological";
    case ErrorCode::NotInvertibleDensity: return "NotInvertibleDensity";
    case ErrorCode::OverlapMismatch: return "OverlapMismatch";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ResolveError: return "ResolveError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace rhocalc
