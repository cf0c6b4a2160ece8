#pragma once

#include <stdexcept>
#include <string>

namespace rhocalc {

enum class ErrorCode {
  ConstraintViolation,
  NegativePower,
  ContextMismatch,
  NotHomogeneous,
  NotInvertible,
  TruncationRequired,
  UnsupportedConstantPart,
  DegreeMismatch,
  ShapeMismatch,
  GradingViolation,
  MixedParity,
  NonzeroDegree,
  NotSplitTuple,
  NotHomological,
  NotInvertibleDensity,
  OverlapMismatch,
  NotClosed,
  SyntaxError,
  ResolveError,
};

const char* to_string(ErrorCode code);

// Every library failure is reported through this one exception type; the
// code lets callers (and the CLI) classify it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace rhocalc
