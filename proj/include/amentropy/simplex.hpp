#pragma once

// Exact finite-space measure theory: partitions, covers, admissible
// partitions of a cover, conditional entropy, and the elementary
// inequalities downstream proofs rest on. Natural log throughout.

#include <string>
#include <vector>

#include "amentropy/common.hpp"

namespace amentropy {

struct FiniteSpace {
  std::vector<std::string> labels;
  std::vector<double> weights;

  int size() const { return static_cast<int>(labels.size()); }
  // weights >= 0 and sum within 1e-12 of 1.
  void validate() const;
  static FiniteSpace uniform(int n);
};

// Blocks are sorted index sets, pairwise disjoint, covering all points;
// canonical order is by smallest member. Empty blocks are dropped.
struct Partition {
  std::vector<std::vector<int>> blocks;

  static Partition points(int n);
  static Partition trivial(int n);
  std::string key() const;
  bool operator==(const Partition& o) const { return blocks == o.blocks; }
};

Partition make_partition(int n, std::vector<std::vector<int>> blocks);
Partition join(const Partition& a, const Partition& b);
bool refines(const Partition& fine, const Partition& coarse);

// Elements are sorted nonempty index sets; overlaps allowed; exact
// duplicates are dropped; the union must cover all points.
struct Cover {
  std::vector<std::vector<int>> elements;
};

Cover make_cover(int n, std::vector<std::vector<int>> elements);
Cover cover_of_partition(const Partition& p);
bool is_partition_cover(const Cover& u);

// Atoms of the membership-signature partition, with the cover elements
// containing each atom and the assignment-combination count.
struct AdmissibleStructure {
  std::vector<std::vector<int>> atoms;
  std::vector<std::vector<int>> hosts;  // hosts[i] = element indices containing atoms[i]
  double combinations{1};
};

Partition generated_partition(int n, const Cover& u);
AdmissibleStructure admissible_structure(int n, const Cover& u);

// All partitions between the generated partition and the cover, obtained
// by assigning atoms to containing elements and merging per element.
// Deduplicated, canonically ordered. Throws bound_error when the
// assignment product exceeds max_combinations (default enum_limit()).
std::vector<Partition> admissible_partitions(int n, const Cover& u,
                                             long long max_combinations = 0);

double entropy(const FiniteSpace& nu, const Partition& alpha);
double conditional_entropy(const FiniteSpace& nu, const Partition& alpha, const Partition& c);

// Disintegrated cover entropy: sum over C-blocks of nu(c) times the
// minimum entropy over partitions admissible for U restricted to c.
double cover_entropy(const FiniteSpace& nu, const Cover& u, const Partition& c);
// Min over globally admissible partitions of conditional entropy given C.
double cover_entropy_global(const FiniteSpace& nu, const Cover& u, const Partition& c);

struct GibbsResult {
  double lhs;
  double rhs;
  bool equal;  // within 1e-10
};

// sum p_i (a_i - log p_i) <= p log(sum e^{a_i}) - p log p, with p = sum p_i.
GibbsResult gibbs_inequality(const std::vector<double>& a, const std::vector<double>& p);

struct MixtureBounds {
  double lower;  // sum lambda_i H_{nu_i}(alpha|C)
  double value;  // H of the mixture
  double upper;  // lower - sum lambda_i log lambda_i
};

MixtureBounds mixture_entropy_bounds(const std::vector<FiniteSpace>& nus,
                                     const std::vector<double>& lambdas, const Partition& alpha,
                                     const Partition& c);

}  // namespace amentropy
