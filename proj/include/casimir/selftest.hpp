#pragma once

#include <string>
#include <vector>

namespace casimir::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double elapsed_ms = 0.0;
};

struct Options {
  bool quick = false;                 // reduced random-draw counts, < 10 s
  bool mutate_kernel_constant = false;  // fault injection: check must then fail
};

// Built-in oracle suite: kernel integrals, oscillator factorization,
// boundary solver vs closed forms, the coefficient and interaction-strength
// identities, conductor and Boyer limits, and an equal-plate attraction
// sweep. Deterministic (fixed seeds).
std::vector<CheckResult> run(const Options& opts);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace casimir::selftest
