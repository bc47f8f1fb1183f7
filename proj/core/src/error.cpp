#include "tinlinq/error.hpp"

namespace tinlinq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidReferencePower: return "InvalidReferencePower";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::OracleLimitExceeded: return "OracleLimitExceeded";
    case ErrorCode::NotPerfect: return "NotPerfect";
    case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::ImmediatelyInfeasible: return "ImmediatelyInfeasible";
    case ErrorCode::InfeasibleGdof: return "InfeasibleGdof";
    case ErrorCode::InfeasibleOrEpsilonTooLarge: return "InfeasibleOrEpsilonTooLarge";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RegionTooTight: return "RegionTooTight";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool is_infeasibility(ErrorCode code) noexcept {
  return code == ErrorCode::ImmediatelyInfeasible || code == ErrorCode::InfeasibleGdof ||
         code == ErrorCode::InfeasibleOrEpsilonTooLarge;
}

}  // namespace tinlinq
