#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tinlinq {

enum class ErrorCode {
  InvalidReferencePower,
  ShapeError,
  IndexError,
  OracleLimitExceeded,
  NotPerfect,
  SubsetTooLarge,
  ImmediatelyInfeasible,
  InfeasibleGdof,
  InfeasibleOrEpsilonTooLarge,
  ConvergenceFailure,
  DivergenceDetected,
  DomainError,
  RegionTooTight,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can branch on the kind, not the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// True for the verdict-style failures that mean "this GDoF target cannot be
// served", as opposed to malformed input.
bool is_infeasibility(ErrorCode code) noexcept;

}  // namespace tinlinq
