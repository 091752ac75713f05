#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace affine {

struct AcceptanceOptions {
  /// Algebra for the criteria defined on a single algebra; 1 and 2 use their fixed lists.
  std::string algebra = "A1~";
  /// Smaller Monte Carlo runs for 9-11, with thresholds moved to the matching critical values.
  bool fast = false;
  std::uint64_t seed = 424242;
  /// Criteria to run; empty means all.
  std::vector<int> only;
  long threads = 0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  double budget = 0;  // runtime bound in seconds, 0 when none
  std::string detail;
};

std::vector<int> acceptance_ids();
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
/// Runs the selected criteria in order; on_result sees each result as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
/// One line: "PASS  3  branching-multiplicities  (0.41 s)  detail".
std::string format_result(const CriterionResult& r);

}  // namespace affine
