#include "amentropy/windows.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace amentropy {

Pt pt_add(const Pt& a, const Pt& b) {
  if (a.size() != b.size()) throw validation_error("point dimension mismatch");
  Pt r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Pt pt_sub(const Pt& a, const Pt& b) {
  if (a.size() != b.size()) throw validation_error("point dimension mismatch");
  Pt r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Pt pt_neg(const Pt& a) {
  Pt r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

Window::Window(int dim, std::vector<Pt> pts) : dim_(dim), pts_(std::move(pts)) {
  if (dim_ < 1) throw validation_error("window dimension must be >= 1");
  for (const Pt& p : pts_) {
    if (static_cast<int>(p.size()) != dim_)
      throw validation_error("window point has wrong dimension");
  }
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

Window Window::interval(Coord lo, Coord hi) {
  std::vector<Pt> pts;
  for (Coord x = lo; x <= hi; ++x) pts.push_back({x});
  return Window(1, std::move(pts));
}

Window Window::box(int dim, Coord n) {
  if (n < 0) throw validation_error("box side must be >= 0");
  std::vector<Pt> pts;
  if (n > 0) {
    Pt cur(dim, 0);
    while (true) {
      pts.push_back(cur);
      int axis = dim - 1;
      while (axis >= 0) {
        if (++cur[axis] < n) break;
        cur[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  return Window(dim, std::move(pts));
}

Window Window::empty(int dim) { return Window(dim, {}); }

Window Window::singleton(Pt p) {
  int d = static_cast<int>(p.size());
  return Window(d, {std::move(p)});
}

bool Window::contains(const Pt& p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p);
}

Coord Window::min1() const {
  if (dim_ != 1 || pts_.empty()) throw validation_error("min1 needs a nonempty 1-d window");
  return pts_.front()[0];
}

Coord Window::max1() const {
  if (dim_ != 1 || pts_.empty()) throw validation_error("max1 needs a nonempty 1-d window");
  return pts_.back()[0];
}

std::string Window::key() const {
  std::string k = std::to_string(dim_);
  for (const Pt& p : pts_) {
    k += ';';
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) k += ',';
      k += std::to_string(p[i]);
    }
  }
  return k;
}

bool Window::operator<(const Window& o) const {
  if (dim_ != o.dim_) return dim_ < o.dim_;
  return pts_ < o.pts_;
}

Window translate(const Window& f, const Pt& g) {
  std::vector<Pt> pts;
  pts.reserve(f.size());
  for (const Pt& p : f.points()) pts.push_back(pt_add(p, g));
  return Window(f.dim(), std::move(pts));
}

Window window_union(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw validation_error("window dimension mismatch");
  std::vector<Pt> pts = a.points();
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  return Window(a.dim(), std::move(pts));
}

Window window_intersection(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw validation_error("window dimension mismatch");
  std::vector<Pt> pts;
  for (const Pt& p : a.points())
    if (b.contains(p)) pts.push_back(p);
  return Window(a.dim(), std::move(pts));
}

Window window_difference(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw validation_error("window dimension mismatch");
  std::vector<Pt> pts;
  for (const Pt& p : a.points())
    if (!b.contains(p)) pts.push_back(p);
  return Window(a.dim(), std::move(pts));
}

bool window_subset(const Window& inner, const Window& outer) {
  if (inner.dim() != outer.dim()) throw validation_error("window dimension mismatch");
  for (const Pt& p : inner.points())
    if (!outer.contains(p)) return false;
  return true;
}

Window minkowski_difference(const Window& a, const Window& k) {
  if (a.dim() != k.dim()) throw validation_error("window dimension mismatch");
  std::set<Pt> pts;
  for (const Pt& p : a.points())
    for (const Pt& q : k.points()) pts.insert(pt_sub(p, q));
  return Window(a.dim(), std::vector<Pt>(pts.begin(), pts.end()));
}

DefectResult invariance_defect(const Window& k, const Window& f) {
  if (k.is_empty()) throw validation_error("invariance_defect: K must be nonempty");
  if (f.is_empty()) throw validation_error("invariance_defect: F must be nonempty");
  if (k.dim() != f.dim()) throw validation_error("window dimension mismatch");
  // K^{-1}F = F - K; a point lies in K^{-1}(F^c) when some K-shift escapes F.
  Window candidates = minkowski_difference(f, k);
  std::vector<Pt> boundary;
  for (const Pt& x : candidates.points()) {
    bool escapes = false;
    for (const Pt& kk : k.points()) {
      if (!f.contains(pt_add(x, kk))) {
        escapes = true;
        break;
      }
    }
    if (escapes) boundary.push_back(x);
  }
  Window bw(f.dim(), std::move(boundary));
  Rat exact(static_cast<long long>(bw.size()), static_cast<long long>(f.size()));
  return DefectResult{exact, exact.to_double(), bw};
}

FolnerSequence FolnerSequence::boxes(int dim) {
  FolnerSequence s;
  s.kind_ = Kind::kBoxes;
  s.dim_ = dim;
  s.tiling_ = true;
  return s;
}

FolnerSequence FolnerSequence::centered_boxes(int dim) {
  FolnerSequence s;
  s.kind_ = Kind::kCentered;
  s.dim_ = dim;
  s.tiling_ = true;
  return s;
}

FolnerSequence FolnerSequence::explicit_list(std::vector<Window> windows, bool tiles_lattice) {
  if (windows.empty()) throw validation_error("Folner sequence needs at least one window");
  FolnerSequence s;
  s.kind_ = Kind::kExplicit;
  s.dim_ = windows.front().dim();
  s.tiling_ = tiles_lattice;
  Pt origin(s.dim_, 0);
  if (!windows.front().contains(origin))
    throw validation_error("Folner sequence: F_1 must contain the origin");
  for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
    if (!window_subset(windows[i], windows[i + 1]) || windows[i].size() >= windows[i + 1].size())
      throw validation_error("Folner sequence: F_" + std::to_string(i + 1) +
                             " is not strictly contained in F_" + std::to_string(i + 2));
  }
  s.list_ = std::move(windows);
  return s;
}

Window FolnerSequence::window(long long n) const {
  if (n < 1) throw validation_error("Folner index must be >= 1");
  switch (kind_) {
    case Kind::kBoxes:
      return Window::box(dim_, n);
    case Kind::kCentered: {
      Coord lo = -(n / 2);
      Pt shift(dim_, lo);
      return translate(Window::box(dim_, n), shift);
    }
    case Kind::kExplicit:
      if (n > static_cast<long long>(list_.size()))
        throw validation_error("Folner sequence has only " + std::to_string(list_.size()) +
                               " windows");
      return list_[static_cast<std::size_t>(n - 1)];
  }
  throw std::logic_error("unreachable");
}

long long FolnerSequence::max_n() const {
  if (kind_ == Kind::kExplicit) return static_cast<long long>(list_.size());
  return LLONG_MAX;
}

std::vector<Pt> tiling_centers(const TilingSpec& spec, const Window& region) {
  const Window& t = spec.tile;
  if (t.is_empty()) throw validation_error("tiling spec: tile must be nonempty");
  if (t.dim() != region.dim()) throw validation_error("window dimension mismatch");

  // Translates at centers c1 != c2 collide exactly when c1 - c2 lies in T - T.
  std::set<Pt> diffs;
  for (const Pt& p : t.points())
    for (const Pt& q : t.points())
      if (p != q) diffs.insert(pt_sub(p, q));

  if (spec.lattice) {
    if (spec.step < 1) throw validation_error("tiling spec: step must be >= 1");
    for (const Pt& v : diffs) {
      bool on_lattice = true;
      for (Coord c : v)
        if (c % spec.step != 0) {
          on_lattice = false;
          break;
        }
      if (on_lattice) {
        Pt w = v;
        for (Coord c : w) {
          if (c > 0) break;
          if (c < 0) {
            w = pt_neg(w);
            break;
          }
        }
        std::string s;
        for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
        throw validation_error("tiling spec: translates overlap at lattice offset (" + s + ")");
      }
    }
    // (T + c) meets region exactly when c lies in region - T.
    Window cand = minkowski_difference(region, t);
    std::vector<Pt> centers;
    for (const Pt& c : cand.points()) {
      bool on_lattice = true;
      for (Coord x : c)
        if (x % spec.step != 0) {
          on_lattice = false;
          break;
        }
      if (on_lattice) centers.push_back(c);
    }
    return centers;
  }

  std::vector<Pt> uniq = spec.centers;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (std::size_t j = i + 1; j < uniq.size(); ++j)
      if (diffs.count(pt_sub(uniq[i], uniq[j])))
        throw validation_error("tiling spec: explicit centers " + std::to_string(i) + " and " +
                               std::to_string(j) + " give overlapping translates");
  Window cand = minkowski_difference(region, t);
  std::vector<Pt> centers;
  for (const Pt& c : uniq)
    if (cand.contains(c)) centers.push_back(c);
  return centers;
}

}  // namespace amentropy
