#include "amentropy/quasitile.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

namespace amentropy {

namespace {

// Dinic max-flow on a small ad hoc graph.
class MaxFlow {
public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), iter_(n) {}

  void add_edge(int from, int to, long long cap) {
    edges_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  long long run(int s, int t) {
    long long flow = 0;
    while (bfs(s, t)) {
      iter_ = head_;
      long long f;
      while ((f = dfs(s, t, std::numeric_limits<long long>::max())) > 0) flow += f;
    }
    return flow;
  }

private:
  struct Edge {
    int to;
    int next;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e = head_[v]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[v] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long dfs(int v, int t, long long f) {
    if (v == t) return f;
    for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
      Edge& ed = edges_[e];
      if (ed.cap > 0 && level_[ed.to] == level_[v] + 1) {
        long long d = dfs(ed.to, t, std::min(f, ed.cap));
        if (d > 0) {
          ed.cap -= d;
          edges_[e ^ 1].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

long long disjointness_demand(std::size_t set_size, const Rat& eps) {
  // floor((1-eps)|A|) + 1, exactly: (den-num)*|A| / den + 1.
  long long n = static_cast<long long>(set_size);
  return (eps.den - eps.num) * n / eps.den + 1;
}

}  // namespace

bool is_eps_disjoint(const std::vector<Window>& sets, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw validation_error("eps outside (0,1)");
  if (sets.empty()) return true;
  Rat reps = Rat::from_double(eps);
  if (reps.num <= 0 || reps.num >= reps.den) throw validation_error("eps outside (0,1)");

  std::map<Pt, int> ground;
  for (const Window& s : sets) {
    if (s.is_empty()) throw validation_error("is_eps_disjoint: sets must be nonempty");
    for (const Pt& p : s.points()) ground.emplace(p, 0);
  }
  int gid = 0;
  for (auto& kv : ground) kv.second = gid++;

  int k = static_cast<int>(sets.size());
  int n = 2 + k + gid;  // source, sink, set nodes, element nodes
  int src = 0, snk = 1;
  MaxFlow mf(n);
  long long total_demand = 0;
  for (int i = 0; i < k; ++i) {
    long long d = disjointness_demand(sets[i].size(), reps);
    total_demand += d;
    mf.add_edge(src, 2 + i, d);
    for (const Pt& p : sets[i].points()) mf.add_edge(2 + i, 2 + k + ground.at(p), 1);
  }
  for (int e = 0; e < gid; ++e) mf.add_edge(2 + k + e, snk, 1);
  return mf.run(src, snk) == total_demand;
}

bool alpha_covers(const std::vector<Window>& pieces, const Window& a, double alpha) {
  if (a.is_empty()) throw validation_error("alpha_covers: A must be nonempty");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("alpha outside (0,1]");
  Rat ralpha = Rat::from_double(alpha);
  std::set<Pt> covered;
  for (const Window& p : pieces)
    for (const Pt& x : p.points())
      if (a.contains(x)) covered.insert(x);
  long long cnt = static_cast<long long>(covered.size());
  return cnt * ralpha.den >= ralpha.num * static_cast<long long>(a.size());
}

void QuasiTiling::verify() const {
  if (tiles.size() != centers.size()) throw std::logic_error("quasi-tiling shape mismatch");
  std::vector<Window> all_translates;
  std::vector<std::set<Pt>> per_tile_cover(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    std::vector<Window> family;
    for (const Pt& c : centers[i]) {
      Window t = translate(tiles[i], c);
      if (!window_subset(t, target))
        throw std::logic_error("quasi-tiling: translate escapes the target");
      family.push_back(t);
      all_translates.push_back(t);
      for (const Pt& p : t.points()) per_tile_cover[i].insert(p);
    }
    if (family.size() > 1 && !is_eps_disjoint(family, epsilon))
      throw std::logic_error("quasi-tiling: tile family is not eps-disjoint");
  }
  for (std::size_t i = 0; i < tiles.size(); ++i)
    for (std::size_t j = i + 1; j < tiles.size(); ++j)
      for (const Pt& p : per_tile_cover[i])
        if (per_tile_cover[j].count(p))
          throw std::logic_error("quasi-tiling: covers of distinct tiles intersect");
  if (!alpha_covers(all_translates, target, 1.0 - epsilon))
    throw std::logic_error("quasi-tiling: cover fraction below 1-eps");
}

QuasiTiling quasi_tile(std::vector<Window> tiles, const Window& a, double eps,
                       double defect_threshold) {
  if (!(eps > 0.0 && eps < 0.25)) throw validation_error("eps outside (0,1/4)");
  if (tiles.empty()) throw validation_error("quasi_tile: need at least one tile");
  if (a.is_empty()) throw validation_error("quasi_tile: target must be nonempty");
  for (const Window& t : tiles)
    if (t.is_empty()) throw validation_error("quasi_tile: tiles must be nonempty");
  std::sort(tiles.begin(), tiles.end(),
            [](const Window& x, const Window& y) {
              if (x.size() != y.size()) return x.size() < y.size();
              return x < y;
            });
  Rat reps = Rat::from_double(eps);

  double defect = invariance_defect(tiles.back(), a).value;
  if (defect > defect_threshold)
    throw insufficient_invariance_error(
        "insufficient invariance: target defect " + fmt_double(defect) +
            " against the largest tile exceeds threshold " + fmt_double(defect_threshold) +
            "; achieved cover fraction 0",
        0.0);

  std::set<Pt> covered_other;  // cells used by earlier (larger) tiles
  std::vector<std::vector<Pt>> centers(tiles.size());

  for (std::size_t rev = tiles.size(); rev-- > 0;) {
    const Window& t = tiles[rev];
    long long demand = disjointness_demand(t.size(), reps);
    std::set<Pt> covered_same;

    // Candidate centers keep the translate inside the target.
    std::vector<Pt> candidates;
    Window shifts = minkowski_difference(a, t);
    for (const Pt& c : shifts.points())
      if (window_subset(translate(t, c), a)) candidates.push_back(c);

    for (const Pt& c : candidates) {
      Window tr = translate(t, c);
      bool clash = false;
      long long fresh = 0;
      for (const Pt& p : tr.points()) {
        if (covered_other.count(p)) {
          clash = true;
          break;
        }
        if (!covered_same.count(p)) ++fresh;
      }
      if (clash || fresh < demand) continue;
      centers[rev].push_back(c);
      for (const Pt& p : tr.points()) covered_same.insert(p);
    }
    covered_other.insert(covered_same.begin(), covered_same.end());
  }

  long long hit = 0;
  for (const Pt& p : a.points())
    if (covered_other.count(p)) ++hit;
  double fraction = static_cast<double>(hit) / static_cast<double>(a.size());

  QuasiTiling result{std::move(tiles), std::move(centers), a, eps, fraction};
  // Exact (1-eps)-cover test; on failure surface the achieved fraction.
  if (hit * reps.den < (reps.den - reps.num) * static_cast<long long>(a.size()))
    throw insufficient_invariance_error(
        "insufficient invariance: achieved cover fraction " + fmt_double(fraction) +
            " is below 1-eps = " + fmt_double(1.0 - eps),
        fraction);
  result.verify();
  return result;
}

std::pair<std::map<Pt, long long>, std::map<Pt, long long>> sum_indicator_identity(
    const Window& t, const Window& e) {
  if (t.is_empty() || e.is_empty())
    throw validation_error("sum_indicator_identity: T and E must be nonempty");
  std::map<Pt, long long> lhs, rhs;
  for (const Pt& tt : t.points()) {
    Window shifted = translate(e, tt);
    for (const Pt& x : shifted.points()) ++lhs[x];
  }
  for (const Pt& g : e.points()) {
    Window shifted = translate(t, g);
    for (const Pt& x : shifted.points()) ++rhs[x];
  }
  return {std::move(lhs), std::move(rhs)};
}

Window invariant_core(const Window& f, const Window& t) {
  if (f.is_empty() || t.is_empty())
    throw validation_error("invariant_core: F and T must be nonempty");
  Window core = f;
  for (const Pt& g : t.points()) core = window_intersection(core, translate(f, pt_neg(g)));
  return core;
}

namespace {

// Splits a window into lattice-connected components (per-axis adjacency).
std::vector<Window> connected_components(const Window& w) {
  std::vector<Window> out;
  std::set<Pt> remaining(w.points().begin(), w.points().end());
  while (!remaining.empty()) {
    std::vector<Pt> comp;
    std::vector<Pt> stack{*remaining.begin()};
    remaining.erase(remaining.begin());
    while (!stack.empty()) {
      Pt p = stack.back();
      stack.pop_back();
      comp.push_back(p);
      for (int axis = 0; axis < static_cast<int>(p.size()); ++axis) {
        for (Coord d : {-1, 1}) {
          Pt q = p;
          q[axis] += d;
          auto it = remaining.find(q);
          if (it != remaining.end()) {
            remaining.erase(it);
            stack.push_back(q);
          }
        }
      }
    }
    out.emplace_back(w.dim(), std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IndicatorDecomposition indicator_decomposition(const Window& f, const Window& t) {
  Window core = invariant_core(f, t);
  if (core.is_empty())
    throw validation_error("indicator_decomposition: invariant core is empty");
  long long tsz = static_cast<long long>(t.size());

  // Residual r(x) = 1_F(x) - m(x)/|T| with m the T+core multiplicity;
  // T+core stays inside F, so r is supported on F with values k/|T|, k >= 0.
  std::map<Pt, long long> mult;
  for (const Pt& g : core.points()) {
    Window shifted = translate(t, g);
    for (const Pt& x : shifted.points()) ++mult[x];
  }

  std::map<Pt, long long> numer;  // r(x) = numer(x)/|T|
  for (const Pt& x : f.points()) {
    long long m = 0;
    if (auto it = mult.find(x); it != mult.end()) m = it->second;
    long long k = tsz - m;
    if (k < 0) throw std::logic_error("indicator_decomposition: negative residual");
    if (k > 0) numer[x] = k;
  }
  for (const auto& [x, m] : mult)
    if (!f.contains(x)) throw std::logic_error("indicator_decomposition: residual outside F");

  // Layer-cake over the distinct levels, then split levels into components.
  std::set<long long> levels;
  for (const auto& kv : numer) levels.insert(kv.second);
  IndicatorDecomposition out{std::move(core), {}, tsz};
  long long prev = 0;
  for (long long lvl : levels) {
    Rat coeff(lvl - prev, tsz);
    std::vector<Pt> pts;
    for (const auto& [x, k] : numer)
      if (k >= lvl) pts.push_back(x);
    Window level_set(f.dim(), std::move(pts));
    for (Window& comp : connected_components(level_set))
      out.terms.push_back({coeff, std::move(comp)});
    prev = lvl;
  }
  return out;
}

}  // namespace amentropy
