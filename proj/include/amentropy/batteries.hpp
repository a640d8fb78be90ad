#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amentropy {

struct BatterySuiteResult {
  std::string name;
  long long trials{0};
  long long failures{0};
  std::string detail;  // first failure, empty when clean
};

// Seeded exact-inequality property suites: indicator identities and
// decomposition bounds, Gibbs inequality with its equality case, entropy
// chain rule, mixture bounds, affinity of Markov rates, the pressure
// sandwich, truncation ratios, and the cover entropy oracle. Deterministic
// given (trials, seed).
std::vector<BatterySuiteResult> run_batteries(long long trials, std::uint64_t seed);

}  // namespace amentropy
