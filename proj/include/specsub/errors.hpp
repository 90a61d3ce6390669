#pragma once

#include <stdexcept>
#include <string>

namespace specsub {

enum class ErrorCode {
  NotSquare,
  NotHermitian,
  ConvergenceFailure,
  SplitDegeneracy,
  EmptySet,
  DimensionMismatch,
  ZeroSeparation,
  DomainViolation,
  DispositionMismatch,
  ConditionViolated,
  AmbiguousComponents,
  DegenerateDraw,
  ConfigInvalid,
  ParseError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SplitDegeneracy: return "SplitDegeneracy";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroSeparation: return "ZeroSeparation";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::DispositionMismatch: return "DispositionMismatch";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::AmbiguousComponents: return "AmbiguousComponents";
    case ErrorCode::DegenerateDraw: return "DegenerateDraw";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

/// Library-wide exception carrying a typed error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace specsub
