#pragma once

#include <functional>
#include <string>
#include <vector>

namespace olab::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Measured quantities against their pinned thresholds.
  std::vector<std::string> details;
  double seconds = 0.0;
};

/// Names of criteria 1..13.
const std::vector<std::string>& criterion_names();

/// Runs one acceptance criterion; numerical exceptions become failures with the message as detail.
CriterionResult run_criterion(int id);

/// Runs the selected criteria (all when empty) in order, reporting each result as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 pde-identity (12.3 s): ..." style one-line summary.
std::string summary_line(const CriterionResult& r);

}  // namespace olab::verify
