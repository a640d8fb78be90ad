#pragma once

// Sub-additive set-function analysis: declared-vs-certified property
// flags, normalized limits along Folner sequences, bounded infima, and
// the exact packing-deficiency function.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "amentropy/common.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

struct PropertyFlags {
  bool monotone{false};
  bool nonnegative{false};
  bool invariant{false};
  bool subadditive{false};
  bool strongly_subadditive{false};
};

// Memoizing wrapper around a pure evaluator with f(empty)=0. Declared
// flags are caller claims; certified flags are set by check_properties
// and are what theorem-level operations trust.
class SetFunction {
public:
  SetFunction(std::function<double(const Window&)> eval, PropertyFlags declared);

  double operator()(const Window& w) const;
  const PropertyFlags& declared() const { return declared_; }
  const PropertyFlags& certified() const { return certified_; }
  void set_certified(const PropertyFlags& f) { certified_ = f; }

private:
  std::function<double(const Window&)> eval_;
  PropertyFlags declared_;
  PropertyFlags certified_;
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

struct PropertyCheckItem {
  std::string name;
  bool declared{false};
  bool passed{false};
  // Failing pair (E, F); monotone/nonnegative/invariant failures use E
  // (and F for the monotone superset or the shifted window).
  std::optional<std::pair<Window, Window>> witness;
};

struct PropertyReport {
  std::vector<PropertyCheckItem> items;
  bool exhaustive{false};
  long long pairs_checked{0};
  bool all_declared_pass() const;
};

// Tests every declared flag; exhaustive over subsets of {0..size_bound}
// in d=1 when the pair count fits the enumeration limit, else seeded
// sampling. Certifies exactly the flags that were declared and passed.
PropertyReport check_properties(SetFunction& f, int size_bound, long long samples,
                                std::uint64_t seed);

// |E| - max number of pairwise-disjoint translates of S inside E, exact.
long long packing_deficiency(const Window& e, const Window& s, long long exact_bound = 64);

// packing_deficiency(., s) as a SetFunction declaring all five flags
// (strong sub-additivity is declared so the checker can refute it).
SetFunction make_packing_deficiency(const Window& s, long long exact_bound = 64);
SetFunction make_cardinality(double scale = 1.0);

struct LimitRow {
  long long n;
  double f_value;
  double normalized;  // f(F_n)/|F_n|
};

struct LimitReport {
  std::vector<LimitRow> rows;
  double estimate;                       // last normalized value
  std::optional<double> inf_normalized;  // present when strongly sub-additive
};

// Normalized values along seq; refuses until the hypothesis flags
// (invariant, subadditive, and monotone/strong/tiling) are certified.
LimitReport limit_along(const SetFunction& f, const FolnerSequence& seq, long long n_max);

struct InfWindowsResult {
  double value;
  Window witness;
  long long enumerated;
};

// Minimum of f(E)/|E| over nonempty E in {1..element_range}, |E| <=
// size_bound. Ties prefer larger |E|, then lexicographically smaller E.
InfWindowsResult inf_over_windows(const SetFunction& f, int element_range, int size_bound);

struct InfTilesResult {
  double value;
  Window argmin_tile;
  std::vector<std::pair<Window, double>> per_tile;
};

InfTilesResult inf_over_tiles(const SetFunction& f, const std::vector<TilingSpec>& tile_list);

// Right-hand side of the decomposition bound: (1/|T|) sum_{g in core}
// f(T+g) + sum a_j f(E_j), for comparing against f(F).
double decomposition_bound_rhs(const SetFunction& f, const Window& t,
                               const struct IndicatorDecomposition& d);

}  // namespace amentropy
