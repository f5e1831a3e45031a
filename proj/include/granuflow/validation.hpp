#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace granuflow {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// ot-oracle, energy-convexity, jko-descent, contraction, cross-validation,
/// shock-bound.
const std::vector<std::string>& suite_names();

/// Criterion ids run by a suite. Throws Config for an unknown suite.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs acceptance criterion `id` (1..13). Failures and library errors are
/// reported in the result, never thrown.
CriterionResult run_criterion(int id);

std::vector<CriterionResult> run_suite(const std::string& suite);

/// One line: "[PASS] 5 contraction (1.2 s): detail".
std::string format_result(const CriterionResult& r);

}  // namespace granuflow
