#pragma once

// Finite-subset calculus on Z^d: windows, boundary defects, Folner
// sequences, and exact tiling-center enumeration.

#include <cstdint>
#include <string>
#include <vector>

#include "amentropy/common.hpp"

namespace amentropy {

using Coord = std::int64_t;
using Pt = std::vector<Coord>;  // one lattice point; length = dimension

Pt pt_add(const Pt& a, const Pt& b);
Pt pt_sub(const Pt& a, const Pt& b);
Pt pt_neg(const Pt& a);

// Finite subset of Z^d. Points are kept lexicographically sorted and
// duplicate-free, so equal sets compare equal memberwise.
class Window {
public:
  Window() = default;
  Window(int dim, std::vector<Pt> pts);

  // {lo..hi} in Z^1; empty when hi < lo.
  static Window interval(Coord lo, Coord hi);
  // {0..n-1}^dim.
  static Window box(int dim, Coord n);
  static Window empty(int dim);
  static Window singleton(Pt p);

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  bool is_empty() const { return pts_.empty(); }
  const std::vector<Pt>& points() const { return pts_; }
  bool contains(const Pt& p) const;
  Coord min1() const;  // d=1 only: least element
  Coord max1() const;  // d=1 only: greatest element

  // Canonical byte key, usable for memoization.
  std::string key() const;

  bool operator==(const Window& o) const { return dim_ == o.dim_ && pts_ == o.pts_; }
  bool operator!=(const Window& o) const { return !(*this == o); }
  bool operator<(const Window& o) const;

private:
  int dim_{1};
  std::vector<Pt> pts_;
};

Window translate(const Window& f, const Pt& g);
Window window_union(const Window& a, const Window& b);
Window window_intersection(const Window& a, const Window& b);
Window window_difference(const Window& a, const Window& b);
bool window_subset(const Window& inner, const Window& outer);
// {a - k : a in A, k in K}.
Window minkowski_difference(const Window& a, const Window& k);

// |K^{-1}F intersect K^{-1}(complement F)| / |F|, computed exactly as a
// rational and returned with its double value.
struct DefectResult {
  Rat exact;
  double value;
  Window boundary;  // the witnessing set K^{-1}F ∩ K^{-1}(F^c)
};
DefectResult invariance_defect(const Window& k, const Window& f);

// Nested exhausting window sequence, 1-based. Box kinds tile the lattice.
class FolnerSequence {
public:
  static FolnerSequence boxes(int dim);
  // Intervals centered near the origin: {-floor(n/2) .. ceil(n/2)-1}^dim.
  static FolnerSequence centered_boxes(int dim);
  // Explicit nested list; windows[i] is F_{i+1}. Validates strict nesting
  // and that F_1 contains the origin.
  static FolnerSequence explicit_list(std::vector<Window> windows, bool tiles_lattice = false);

  Window window(long long n) const;
  int dim() const { return dim_; }
  // True when every member tiles Z^d by translations.
  bool tiling() const { return tiling_; }
  long long max_n() const;  // explicit lists are finite; box kinds unbounded

private:
  enum class Kind { kBoxes, kCentered, kExplicit };
  Kind kind_{Kind::kBoxes};
  int dim_{1};
  bool tiling_{false};
  std::vector<Window> list_;
};

// Exact tiling of a region by translates of one tile. Centers are either
// the lattice (step Z)^d or an explicit list; translates must be disjoint.
struct TilingSpec {
  Window tile;
  bool lattice{true};
  Coord step{1};
  std::vector<Pt> centers;  // used when lattice == false
};

// All centers c (sorted lexicographically) with (tile + c) meeting region.
// Throws validation_error when two admissible translates overlap.
std::vector<Pt> tiling_centers(const TilingSpec& spec, const Window& region);

}  // namespace amentropy
