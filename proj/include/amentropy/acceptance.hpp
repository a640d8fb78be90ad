#pragma once

// Release gate: ten numbered criteria with pinned oracle values, tolerances,
// and per-criterion runtime budgets. Each criterion runs independently and
// reports every violated expectation, not just the first.

#include <string>
#include <vector>

namespace amentropy {

struct CriterionResult {
  int number{0};
  std::string title;
  bool pass{false};
  double seconds{0};
  double budget_seconds{0};
  // Measured headline values when passing; violated expectations otherwise.
  std::string detail;
};

std::vector<CriterionResult> run_acceptance();

}  // namespace amentropy
