#pragma once

#include <string>
#include <vector>

#include "amentropy/bundle.hpp"
#include "amentropy/measures.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

// Candidate entropy tuple, described by one cylinder prefix per coordinate.
// Each prefix is read at positions 0..len-1 of the fiber; the tuple is tested
// at the stated window resolution with a strict acceptance threshold tau.
struct TupleQuery {
  std::vector<Word> prefixes;
  int resolution{1};
  double tau{0.1};

  // Arity >= 2, prefixes fit inside the resolution window, letters in range,
  // cylinders pairwise disjoint (no prefix may extend another).
  void validate(const RandomSFT& sys) const;
};

// Cover whose elements are the complements of the query cylinders, one
// element per coordinate, each applicable at every base point.
FiberCover complement_cover(const RandomSFT& sys, const TupleQuery& q);

// Outcome of a finite-window tuple test. Positivity above tau is evidence
// for the tuple; a value at or below tau never certifies the limit is zero,
// which the caveat records.
struct TupleDecision {
  bool accept{false};
  double value{0};
  std::string caveat;
};

// Topological test: growth estimate of minimal subcover counts for the
// complement cover, evaluated at the query resolution.
TupleDecision topological_tuple_test(const RandomSFT& sys, const TupleQuery& q,
                                     int subcover_bound = 256);

// Measure test: cover entropy estimate of the complement cover under mu,
// evaluated at the query resolution.
TupleDecision measure_tuple_test(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                 const TupleQuery& q);

// Declared structure of the invariant sigma-algebra generated by the zero
// entropy part of a scenario. The tuple product laws depend on it, and no
// computation here can recover it from the transition data alone, so it must
// be stated by the scenario author; undeclared scenarios are refused.
struct PinskerScenario {
  enum class Mode { trivial_factor, full_factor };
  Mode mode{Mode::trivial_factor};
  bool declared{false};
  std::string note;

  static PinskerScenario trivial(std::string note = "");
  static PinskerScenario full(std::string note = "");
};

// One atom of the n-fold tuple product law at a given resolution: a word per
// coordinate and its mass.
struct LambdaRow {
  std::vector<Word> words;
  double mass{0};
};

// n-fold tuple product law on resolution-length words. With a trivial factor
// the coordinates are independent given the base point; with a full factor
// the law sits on the diagonal. Rows are sorted, zero mass dropped.
std::vector<LambdaRow> lambda_n(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                const PinskerScenario& sc, int n, int resolution);

// Support of lambda_n with the all-equal tuples removed: the measure side's
// own tuple set at this resolution, sorted.
std::vector<std::vector<Word>> tuple_set_from_support(const RandomSFT& sys,
                                                      const RelativeMarkovMeasure& mu,
                                                      const PinskerScenario& sc, int n,
                                                      int resolution);

// Three finite-window readings of tuple positivity plus their agreement at
// the query threshold: the worst normalized cover entropy over all windows
// inside the budget, the growth estimate at the budget, and the tuple
// product mass of the joint complement event.
struct ProbeReport {
  double inf_normalized{0};
  double h_estimate{0};
  double lambda_mass{0};
  bool inf_positive{false};
  bool h_positive{false};
  bool mass_positive{false};
  bool consistent{false};
  std::string caveat;
};

ProbeReport positivity_equivalence_probe(const RandomSFT& sys,
                                         const RelativeMarkovMeasure& mu,
                                         const TupleQuery& q, const PinskerScenario& sc,
                                         int window_budget);

}  // namespace amentropy
