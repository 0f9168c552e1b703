#include "rpp/error.hpp"

namespace rpp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficientB: return "RankDeficientB";
    case ErrorCode::NotSelfConjugate: return "NotSelfConjugate";
    case ErrorCode::MultiplicityOverflow: return "MultiplicityOverflow";
    case ErrorCode::ConjugacyViolation: return "ConjugacyViolation";
    case ErrorCode::RankDeficientX: return "RankDeficientX";
    case ErrorCode::SingularX: return "SingularX";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::BudgetExhaustedNoCandidate: return "BudgetExhaustedNoCandidate";
    case ErrorCode::MissingCase: return "MissingCase";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace rpp
