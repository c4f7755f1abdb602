#pragma once

#include <stdexcept>
#include <string>

namespace steklov {

enum class ErrorCode {
  DomainError,
  Overlap,
  HoleOutsideDisk,
  RadiusNonpositive,
  DegreeTooLarge,
  NonPositiveDensity,
  MassMatrixDegenerate,
  ConditioningFailure,
  IndexOutOfRange,
  NotAnEigenfunction,
  NotNormal,
  BoundaryTangencyViolated,
  Unsolvable,
  BoundarySystemSingular,
};

const char* to_string(ErrorCode code);

/// Input validation errors map to CLI exit code 2, numerical failures to 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace steklov
