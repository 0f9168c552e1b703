#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpp {

enum class ErrorCode {
  DimensionMismatch,
  RankDeficientB,
  NotSelfConjugate,
  MultiplicityOverflow,
  ConjugacyViolation,
  RankDeficientX,
  SingularX,
  Infeasible,
  BudgetExhaustedNoCandidate,
  MissingCase,
  MalformedFile,
  NonPositiveValue,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; what() holds "<Code>: detail".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpp
