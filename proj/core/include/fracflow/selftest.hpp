#pragma once

#include <string>
#include <vector>

namespace fracflow {

/// Outcome of one acceptance check, with the measured values in `detail`.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Run the full acceptance suite (15 checks, the last one being the total
/// runtime budget). Shared by the command-line selftest and the test suite.
std::vector<CriterionResult> run_acceptance_suite();

}  // namespace fracflow
