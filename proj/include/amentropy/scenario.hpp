#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amentropy/bundle.hpp"
#include "amentropy/measures.hpp"
#include "amentropy/tuples.hpp"

namespace amentropy {

// A self-contained experiment description loaded from JSON: the bundle
// system, an optional potential, a working cover, named measures, the
// declared Pinsker mode, and reproducibility knobs. Every referenced object
// is validated while loading; nothing is computed.
struct Scenario {
  std::string id;
  RandomSFT sys;
  PotentialFamily potential{PotentialFamily::zero()};
  FiberCover cover;
  std::map<std::string, RelativeMarkovMeasure> measures;
  std::optional<PinskerScenario> pinsker;
  int window_bound{20};
  std::uint64_t seed{1};

  // Named measure, or the alphabetically first one when name is empty;
  // nullptr when absent.
  const RelativeMarkovMeasure* find_measure(const std::string& name) const;
};

Scenario scenario_from_string(const std::string& text);
Scenario load_scenario(const std::string& path);

// Directory holding the shipped scenario files, for tests and the
// acceptance driver.
std::string shipped_scenario_dir();

}  // namespace amentropy
