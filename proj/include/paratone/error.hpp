// Typed error codes shared by every module. Callers that need to branch on
// the failure kind catch paratone::Error and inspect code().
#pragma once

#include <stdexcept>
#include <string>

namespace paratone {

enum class ErrorCode {
  MalformedHeader,
  UnsupportedFormat,
  IoFailure,
  TooShort,
  NoVoicedFrames,
  InsufficientData,
  NonFiniteValue,
  EmptySpec,
  EmptyCaption,
  UnrecognizedClause,
  DuplicateAttribute,
  UnknownAttribute,
  DimensionMismatch,
  NonFiniteGradient,
  ZeroNormEmbedding,
  TimeOutOfRange,
  NonFiniteLoss,
  NonFiniteState,
  InvalidParams,
  PreconditionViolated,
  MissingCheckpoint,
  StageFailure,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoVoicedFrames: return "NoVoicedFrames";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptySpec: return "EmptySpec";
    case ErrorCode::EmptyCaption: return "EmptyCaption";
    case ErrorCode::UnrecognizedClause: return "UnrecognizedClause";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::ZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::MissingCheckpoint: return "MissingCheckpoint";
    case ErrorCode::StageFailure: return "StageFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace paratone
