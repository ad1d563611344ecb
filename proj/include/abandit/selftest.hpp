#pragma once

#include <string>
#include <vector>

namespace abandit {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Analytic examples and randomized property checks over every module.
// Quick enough to run from the command line (well under a second).
std::vector<SelfCheck> run_selftest();

}  // namespace abandit
