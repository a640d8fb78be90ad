#pragma once

// Ornstein-Weiss combinatorics: eps-disjoint families, alpha-covers,
// greedy quasi-tiling of a window, and exact indicator decompositions.

#include <map>
#include <vector>

#include "amentropy/common.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

// Raised when quasi_tile cannot certify a (1-eps)-cover of the target.
class insufficient_invariance_error : public validation_error {
public:
  insufficient_invariance_error(const std::string& msg, double fraction)
      : validation_error(msg), achieved_fraction(fraction) {}
  double achieved_fraction;
};

// True iff pairwise-disjoint B_i subset A_i exist with |B_i| > (1-eps)|A_i|.
// Decided exactly: set i demands floor((1-eps)|A_i|)+1 private elements and
// a max-flow feasibility test assigns ground elements.
bool is_eps_disjoint(const std::vector<Window>& sets, double eps);

// True iff |A intersect union(pieces)| >= alpha * |A|, exactly in rationals.
bool alpha_covers(const std::vector<Window>& pieces, const Window& a, double alpha);

struct QuasiTiling {
  std::vector<Window> tiles;        // ascending cardinality
  std::vector<std::vector<Pt>> centers;  // centers[i] places tiles[i]
  Window target;
  double epsilon{0};
  double cover_fraction{0};

  // Checks the three defining conditions; throws on violation.
  void verify() const;
};

// Greedy quasi-tiling, largest tile first; lexicographically smallest
// feasible center wins each placement. The returned tiling is verified.
QuasiTiling quasi_tile(std::vector<Window> tiles, const Window& a, double eps,
                       double defect_threshold = 1.0);

// Both sides of the double-count sum_{t in T} 1_{E+t} = sum_{g in E} 1_{T+g}.
std::pair<std::map<Pt, long long>, std::map<Pt, long long>> sum_indicator_identity(
    const Window& t, const Window& e);

// F intersect the intersection over g in T of (F - g).
Window invariant_core(const Window& f, const Window& t);

struct DecompositionTerm {
  Rat coeff;
  Window set;
};

struct IndicatorDecomposition {
  Window core;                           // E = invariant_core(F, T)
  std::vector<DecompositionTerm> terms;  // positive rational coefficients
  long long t_size{1};
};

// Exact rational identity 1_F = (1/|T|) sum_{g in E} 1_{T+g} + sum a_j 1_{E_j}.
// Residual level sets are split into lattice-connected components.
IndicatorDecomposition indicator_decomposition(const Window& f, const Window& t);

}  // namespace amentropy
