// Acceptance suite: runs every verification criterion at its pinned
// tolerance and prints one PASS/FAIL line per criterion. Exits nonzero if
// any criterion fails. Set QMOD_CLI to the CLI binary to also exercise the
// byte-identical-output criterion through the real executable.

#include <cstdio>

#include "qmod/verify.hpp"

namespace {

const char* criterion_summary(int criterion) {
  switch (criterion) {
    case 1: return "binomial thinning law vs enumerated amplitudes (1e-12)";
    case 2: return "Kraus completeness on the eta grid (1e-12)";
    case 3: return "entropy unit values and the infinity marker";
    case 4: return "fundamental inequalities on random ensembles (1e-9)";
    case 5: return "block additivity, N = 1..3, sparse path (1e-9)";
    case 6: return "PPM closed form vs definitional value (1e-9)";
    case 7: return "closed-form PPM ratio is 1-(1-eta)^d (1e-12)";
    case 8: return "mutual-entropy and ratio orderings, both value pairs (1e-9)";
    case 9: return "PWM probe reports both values; discrepancy is WARN only";
    case 10: return "dense vs sparse classical agreement (1e-10)";
    case 11: return "byte-identical CSV across reruns";
  }
  return "";
}

}  // namespace

int main() {
  auto checks = qmod::standard_checks();
  std::sort(checks.begin(), checks.end(),
            [](const auto& a, const auto& b) { return a.criterion < b.criterion; });

  int failures = 0;
  for (const auto& check : checks) {
    qmod::CheckResult result;
    try {
      result = check.run();
    } catch (const std::exception& e) {
      result = qmod::CheckResult::fail(std::string("exception: ") + e.what());
    }
    for (const auto& warning : result.warnings)
      std::printf("[WARN] criterion %d (%s): %s\n", check.criterion, check.name.c_str(),
                  warning.c_str());
    if (result.pass) {
      std::printf("[PASS] criterion %2d: %s : %s\n", check.criterion, check.name.c_str(),
                  criterion_summary(check.criterion));
    } else {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s : %s\n", check.criterion, check.name.c_str(),
                  result.failure.c_str());
    }
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", checks.size());
  } else {
    std::printf("acceptance: %d of %zu criteria failed\n", failures, checks.size());
  }
  return failures == 0 ? 0 : 1;
}
