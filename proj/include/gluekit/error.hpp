#pragma once

#include <stdexcept>
#include <string>

namespace gluekit {

enum class ErrorKind {
  UnsupportedRegime,
  RegimeMismatch,
  AlgebraMismatch,
  NotAUnit,
  NoExactSource,
  CapExceeded,
  IncompatibleDatum,
  PrecisionLoss,
  SearchExhausted,
  DegreeBoundInconclusive,
  VerificationFailed,
  NotIntegral,
  ParseError,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::NoExactSource: return "NoExactSource";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::IncompatibleDatum: return "IncompatibleDatum";
    case ErrorKind::PrecisionLoss: return "PrecisionLoss";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::DegreeBoundInconclusive: return "DegreeBoundInconclusive";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::NotIntegral: return "NotIntegral";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

class GlueError : public std::runtime_error {
 public:
  GlueError(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
  throw GlueError(kind, msg);
}

}  // namespace gluekit
