#ifndef MIXSEP_ERROR_HPP
#define MIXSEP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mixsep {

// Every failure the library raises carries one of these codes. The CLI maps
// the category of the code onto its exit status.
enum class ErrorCode {
  // validation (exit 2)
  NonPositiveInput,
  NonPositiveDensity,
  ValidationError,
  ParseError,
  GridMismatch,
  GridTooSmall,
  InsufficientData,
  TooFewPoints,
  NonPositiveL3,
  OutOfDomain,
  // numerical (exit 3)
  PoleAtResonance,
  Unreachable,
  ZeroReference,
  ZeroDenominator,
  NotConverged,
  StepUnstable,
  NumericalNaN,
  NotSeparated,
  TooNoisy,
  CenterNotFound,
  FitDiverged,
  // i/o (exit 4)
  MissingInput,
  IoError,
};

enum class ErrorCategory { Validation, Numerical, Io };

ErrorCategory category_of(ErrorCode code);
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

// Exit status used by the command-line tool.
int exit_code_for(ErrorCategory category);

}  // namespace mixsep

#endif  // MIXSEP_ERROR_HPP
