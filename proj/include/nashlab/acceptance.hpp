#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nashlab/profile.hpp"

namespace nashlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double budget_seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  ConstantsProfile profile = ConstantsProfile::desk();
  std::vector<int> only;  // empty runs all nine
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
// Calls `report` after each criterion, in order.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opt,
    const std::function<void(const CriterionResult&)>& report = {});

// "PASS [3] brouwer-soundness (12.3s / 300s): ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace nashlab
