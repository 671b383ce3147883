#pragma once

#include <string>
#include <vector>

namespace dualprox::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> prox_properties();
std::vector<CheckResult> fem_properties();
std::vector<CheckResult> objective_properties();
std::vector<CheckResult> cg_properties();
std::vector<CheckResult> ssn_properties();

// all of the above, in order
std::vector<CheckResult> run_all();

}  // namespace dualprox::checks
