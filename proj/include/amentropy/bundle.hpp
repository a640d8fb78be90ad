#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amentropy/common.hpp"
#include "amentropy/subadditive.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

// Finite base system: a permutation theta of {0..size-1} with an invariant
// probability vector (constant on each theta orbit).
struct Driver {
  int size{1};
  std::vector<int> theta;
  std::vector<double> weights;

  static Driver point();
  static Driver cycle(int m);  // full cycle, uniform weights
  void validate() const;
  int step(int omega) const { return theta[static_cast<std::size_t>(omega)]; }
  // theta^k(omega) for any integer k (negative uses the inverse).
  int power(int omega, Coord k) const;
  std::vector<int> orbit(int omega) const;
};

// Shift system whose fiber over omega consists of bi-infinite sequences x
// with matrices[theta^i omega][x_i][x_{i+1}] = 1. core[omega] holds the
// letters that actually occur in bi-infinite points, computed by pruning.
struct RandomSFT {
  Driver driver;
  int alphabet{0};
  std::vector<std::vector<std::vector<int>>> matrices;  // per omega, a x a
  std::vector<std::vector<char>> core;                  // derived

  static RandomSFT make(Driver d, int alphabet,
                        std::vector<std::vector<std::vector<int>>> matrices);
  // Deterministic SFT: singleton base, one matrix.
  static RandomSFT deterministic(int alphabet, std::vector<std::vector<int>> matrix);
};

using Word = std::vector<int>;
std::string word_str(const Word& w);

// All patterns of the fiber over omega on the window f (coordinates read at
// theta-shifted base points). General windows restrict the interval hull.
std::vector<Word> fiber_language(const RandomSFT& sys, int omega, const Window& f);
// Count of fiber words on an interval window without materializing them.
double fiber_word_count(const RandomSFT& sys, int omega, const Window& f);

// One cover element: on base points in omega_set the fiber slice is the set
// of points whose pattern on `window` lies in `words` (its complement when
// complement is set); off omega_set the slice is empty (complement form: the
// whole fiber).
struct FiberCoverElement {
  std::vector<int> omega_set;
  Window window{Window::singleton(Pt{0})};
  std::vector<Word> words;
  bool complement{false};
};

struct FiberCover {
  std::vector<FiberCoverElement> elements;

  // Generating partition {[letter] : letter < alphabet} at coordinate 0.
  static FiberCover letter_partition(const Driver& d, int alphabet);
  // The complement family {[letter]^c}.
  static FiberCover letter_complements(const Driver& d, int alphabet);
};

// The join over g in f of the shifted cover slices, materialized on the
// language of the interval hull of f + element windows.
struct PullbackCover {
  Window hull{Window::empty(1)};
  std::vector<Word> words;                 // language on hull, sorted
  std::vector<std::vector<int>> elements;  // sorted word indices, deduplicated
};
PullbackCover pullback_cover(const RandomSFT& sys, const FiberCover& u, int omega,
                             const Window& f, long long max_elements = 0);

// True when every element reads coordinate 0 and, at each base point, the
// applicable slices split the core letters exactly; fills one letter bitmask
// per (base point, element) when asked.
bool cover_is_letter_partition(const RandomSFT& sys, const FiberCover& u,
                               std::vector<std::vector<std::uint64_t>>* letters = nullptr);

struct SubcoverResult {
  long long count{0};
  bool partition_fast_path{false};
  // Indices into pullback elements; empty on the fast path, where every
  // nonempty cell of the partition is required.
  std::vector<int> witness;
};
// Exact minimum number of pullback elements covering the fiber words.
SubcoverResult min_subcover(const RandomSFT& sys, const FiberCover& u, int omega,
                            const Window& f, int max_elements = 24);

struct EstimateRow {
  int n{0};
  long long window_size{0};
  double total{0};        // averaged quantity over the base, unnormalized
  double normalized{0};   // total / window_size
  double inf_so_far{0};   // running inf of normalized
  double increment{0};    // (total_n - total_{n-1}) / (size_n - size_{n-1})
  double sup_total{0};    // averaged sup of the potential (pressure runs)
  double sup_normalized{0};
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  double estimate{0};  // increment at the last row
  std::optional<double> inf_normalized;  // final inf, for tiling sequences
  std::optional<double> sup_estimate;    // potential sup increment at n_max
};

// Fill the derived row columns (normalized, inf, increments) from totals.
EstimateReport build_estimate_report(std::vector<EstimateRow> rows,
                                     const FolnerSequence& seq, bool with_sup);

EstimateReport fiber_topological_entropy(const RandomSFT& sys, const FiberCover& u,
                                         const FolnerSequence& seq, int n_max,
                                         int subcover_bound = 24);

// Potential family d_F. Additive kinds read one letter per window point via
// site[omega][letter]; an empty site table means the zero potential. Custom
// kinds carry an evaluator (omega, word on the hull of F, F) and declared
// window-calculus flags that must be certified by sampling before use in
// estimate runs.
struct PotentialFamily {
  enum class Kind { additive, additive_plus_sqrt, custom };
  Kind kind{Kind::additive};
  std::vector<std::vector<double>> site;
  std::function<double(int, const Word&, const Window&)> eval;
  PropertyFlags declared;
  bool certified{false};

  static PotentialFamily zero();
  static PotentialFamily additive(std::vector<std::vector<double>> site);
  static PotentialFamily additive_plus_sqrt(std::vector<std::vector<double>> site);
  static PotentialFamily custom(std::function<double(int, const Word&, const Window&)> eval,
                                PropertyFlags declared);

  // Value of d_F at the hull word w (w covers the interval hull of f).
  double value(const Driver& d, int omega, const Word& w, const Window& f) const;
};

struct PotentialCheck {
  bool passed{true};
  std::string detail;
};
// Sampled verification of the declared flags; marks the family certified on
// success. Additive kinds are certified by construction.
PotentialCheck certify_potential(const RandomSFT& sys, PotentialFamily& d,
                                 std::uint64_t seed = 1, int samples = 200);

// Exact minimum over admissible partitions of the pullback of the summed
// cell suprema of e^{d_F}; log_fiber_pressure computes its log stably.
double fiber_pressure(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                      int omega, const Window& f, long long max_partitions = 0);
double log_fiber_pressure(const RandomSFT& sys, const PotentialFamily& d,
                          const FiberCover& u, int omega, const Window& f,
                          long long max_partitions = 0);

EstimateReport pressure_estimate(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const FolnerSequence& seq, int n_max,
                                 long long max_partitions = 0);

// U_n: elements intersected with the n-th exhaustion stage plus one
// whole-space element off it. Stages must be nested increasing.
FiberCover truncate_cover(const RandomSFT& sys, const FiberCover& u,
                          const std::vector<std::vector<int>>& stages, int n);

struct TruncationCheck {
  double ratio{1};  // pressure(U) / pressure(U_n)
  double bound{1};  // exp sum over g in F off the stage of log N(U, theta^g omega)
  bool holds{true};
};
TruncationCheck truncation_check(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const std::vector<int>& stage,
                                 int omega, const Window& f);

// Window set functions for the sub-additive calculus: averaged log minimal
// subcover count, and averaged log fiber pressure.
SetFunction make_fiber_entropy_function(const RandomSFT& sys, FiberCover u,
                                        int subcover_bound = 24);
SetFunction make_log_pressure_function(const RandomSFT& sys, PotentialFamily d, FiberCover u,
                                       long long max_partitions = 0);

}  // namespace amentropy
