#include "mixsep/error.hpp"

namespace mixsep {

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveInput:
    case ErrorCode::NonPositiveDensity:
    case ErrorCode::ValidationError:
    case ErrorCode::ParseError:
    case ErrorCode::GridMismatch:
    case ErrorCode::GridTooSmall:
    case ErrorCode::InsufficientData:
    case ErrorCode::TooFewPoints:
    case ErrorCode::NonPositiveL3:
    case ErrorCode::OutOfDomain:
      return ErrorCategory::Validation;
    case ErrorCode::MissingInput:
    case ErrorCode::IoError:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Numerical;
  }
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonPositiveL3: return "NonPositiveL3";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::PoleAtResonance: return "PoleAtResonance";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::NumericalNaN: return "NumericalNaN";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::TooNoisy: return "TooNoisy";
    case ErrorCode::CenterNotFound: return "CenterNotFound";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation: return 2;
    case ErrorCategory::Numerical: return 3;
    case ErrorCategory::Io: return 4;
  }
  return 1;
}

}  // namespace mixsep
