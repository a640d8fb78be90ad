#include "amentropy/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "amentropy/simplex.hpp"

namespace amentropy {

namespace {

void require_1d(const Window& w) {
  if (w.dim() != 1) throw validation_error("bundle windows are one-dimensional");
}

std::vector<int> canon_set(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Word> canon_words(std::vector<Word> w) {
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

}  // namespace

Driver Driver::point() {
  Driver d;
  d.size = 1;
  d.theta = {0};
  d.weights = {1.0};
  return d;
}

Driver Driver::cycle(int m) {
  Driver d;
  d.size = m;
  for (int i = 0; i < m; ++i) {
    d.theta.push_back((i + 1) % m);
    d.weights.push_back(1.0 / m);
  }
  return d;
}

void Driver::validate() const {
  if (size < 1) throw validation_error("driver size must be positive");
  if (static_cast<int>(theta.size()) != size || static_cast<int>(weights.size()) != size)
    throw validation_error("driver field sizes disagree with size");
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  for (int t : theta) {
    if (t < 0 || t >= size || seen[static_cast<std::size_t>(t)])
      throw validation_error("driver map is not a permutation");
    seen[static_cast<std::size_t>(t)] = 1;
  }
  double sum = 0;
  for (double w : weights) {
    if (w < 0) throw validation_error("driver weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw validation_error("driver weights must sum to 1");
  for (int i = 0; i < size; ++i)
    if (std::abs(weights[static_cast<std::size_t>(i)] -
                 weights[static_cast<std::size_t>(theta[static_cast<std::size_t>(i)])]) > 1e-12)
      throw validation_error("driver weights must be invariant under the map");
}

int Driver::power(int omega, Coord k) const {
  std::vector<int> orb = orbit(omega);
  Coord len = static_cast<Coord>(orb.size());
  Coord pos = static_cast<Coord>(std::find(orb.begin(), orb.end(), omega) - orb.begin());
  Coord idx = ((pos + k) % len + len) % len;
  return orb[static_cast<std::size_t>(idx)];
}

std::vector<int> Driver::orbit(int omega) const {
  std::vector<int> orb;
  int x = omega;
  do {
    orb.push_back(x);
    x = step(x);
  } while (x != omega);
  // Rotate so the orbit starts at its least element; power() indexes into it.
  auto mn = std::min_element(orb.begin(), orb.end());
  std::rotate(orb.begin(), mn, orb.end());
  return orb;
}

RandomSFT RandomSFT::make(Driver d, int alphabet,
                          std::vector<std::vector<std::vector<int>>> matrices) {
  d.validate();
  if (alphabet < 1) throw validation_error("alphabet must be positive");
  if (static_cast<int>(matrices.size()) != d.size)
    throw validation_error("need one transition matrix per driver point");
  for (const auto& m : matrices) {
    if (static_cast<int>(m.size()) != alphabet)
      throw validation_error("transition matrix rows disagree with alphabet");
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != alphabet)
        throw validation_error("transition matrix columns disagree with alphabet");
      for (int e : row)
        if (e != 0 && e != 1) throw validation_error("transition entries must be 0 or 1");
    }
  }
  RandomSFT sys;
  sys.driver = std::move(d);
  sys.alphabet = alphabet;
  sys.matrices = std::move(matrices);

  int m = sys.driver.size;
  std::vector<int> inv(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(sys.driver.step(i))] = i;
  sys.core.assign(static_cast<std::size_t>(m),
                  std::vector<char>(static_cast<std::size_t>(alphabet), 1));
  // Drop letters with no successor in the next core or no predecessor in the
  // previous core until nothing changes.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int w = 0; w < m; ++w) {
      int nx = sys.driver.step(w);
      int pv = inv[static_cast<std::size_t>(w)];
      for (int x = 0; x < alphabet; ++x) {
        auto& cx = sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)];
        if (!cx) continue;
        bool succ = false, pred = false;
        for (int y = 0; y < alphabet && !succ; ++y)
          succ = sys.core[static_cast<std::size_t>(nx)][static_cast<std::size_t>(y)] &&
                 sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                             [static_cast<std::size_t>(y)];
        for (int y = 0; y < alphabet && !pred; ++y)
          pred = sys.core[static_cast<std::size_t>(pv)][static_cast<std::size_t>(y)] &&
                 sys.matrices[static_cast<std::size_t>(pv)][static_cast<std::size_t>(y)]
                             [static_cast<std::size_t>(x)];
        if (!succ || !pred) {
          cx = 0;
          changed = true;
        }
      }
    }
  }
  for (int w = 0; w < m; ++w) {
    bool any = false;
    for (char c : sys.core[static_cast<std::size_t>(w)]) any = any || c;
    if (!any)
      throw validation_error("fiber over driver point " + std::to_string(w) + " is empty");
  }
  return sys;
}

RandomSFT RandomSFT::deterministic(int alphabet, std::vector<std::vector<int>> matrix) {
  return make(Driver::point(), alphabet, {std::move(matrix)});
}

std::string word_str(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && w[i - 1] > 9) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

namespace {

// Base point and core/transition lookups along the hull [lo, hi].
struct HullView {
  const RandomSFT* sys;
  Coord lo, hi;
  std::vector<int> base;  // base[i] = theta^{lo+i}(omega)

  HullView(const RandomSFT& s, int omega, Coord l, Coord h) : sys(&s), lo(l), hi(h) {
    for (Coord c = lo; c <= hi; ++c) base.push_back(s.driver.power(omega, c));
  }
  int len() const { return static_cast<int>(hi - lo + 1); }
  bool in_core(int i, int x) const {
    return sys->core[static_cast<std::size_t>(base[static_cast<std::size_t>(i)])]
                    [static_cast<std::size_t>(x)] != 0;
  }
  bool edge(int i, int x, int y) const {
    return sys->matrices[static_cast<std::size_t>(base[static_cast<std::size_t>(i)])]
                        [static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] != 0;
  }
};

std::vector<Word> hull_language(const RandomSFT& sys, int omega, Coord lo, Coord hi) {
  HullView hv(sys, omega, lo, hi);
  double count = fiber_word_count(sys, omega, Window::interval(lo, hi));
  if (count > static_cast<double>(enum_limit()))
    throw bound_error("fiber language has " + fmt_double(count) + " words; exceeds bound " +
                      std::to_string(enum_limit()));
  std::vector<Word> out;
  Word cur(static_cast<std::size_t>(hv.len()));
  auto rec = [&](auto&& self, int i) -> void {
    if (i == hv.len()) {
      out.push_back(cur);
      return;
    }
    for (int x = 0; x < sys.alphabet; ++x) {
      if (!hv.in_core(i, x)) continue;
      if (i > 0 && !hv.edge(i - 1, cur[static_cast<std::size_t>(i - 1)], x)) continue;
      cur[static_cast<std::size_t>(i)] = x;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

std::vector<Word> fiber_language(const RandomSFT& sys, int omega, const Window& f) {
  require_1d(f);
  if (f.size() == 0) return {Word{}};
  Coord lo = f.min1(), hi = f.max1();
  std::vector<Word> hull = hull_language(sys, omega, lo, hi);
  if (f.size() == static_cast<std::size_t>(hi - lo + 1)) return hull;
  std::set<Word> proj;
  for (const Word& w : hull) {
    Word p;
    for (const Pt& pt : f.points()) p.push_back(w[static_cast<std::size_t>(pt[0] - lo)]);
    proj.insert(std::move(p));
  }
  return {proj.begin(), proj.end()};
}

double fiber_word_count(const RandomSFT& sys, int omega, const Window& f) {
  require_1d(f);
  if (f.size() == 0) return 1.0;
  Coord lo = f.min1(), hi = f.max1();
  if (f.size() != static_cast<std::size_t>(hi - lo + 1))
    throw validation_error("word counts need an interval window");
  HullView hv(sys, omega, lo, hi);
  std::vector<double> cnt(static_cast<std::size_t>(sys.alphabet), 0.0);
  for (int x = 0; x < sys.alphabet; ++x)
    if (hv.in_core(0, x)) cnt[static_cast<std::size_t>(x)] = 1.0;
  for (int i = 1; i < hv.len(); ++i) {
    std::vector<double> nxt(static_cast<std::size_t>(sys.alphabet), 0.0);
    for (int y = 0; y < sys.alphabet; ++y) {
      if (!hv.in_core(i, y)) continue;
      for (int x = 0; x < sys.alphabet; ++x)
        if (cnt[static_cast<std::size_t>(x)] > 0 && hv.edge(i - 1, x, y))
          nxt[static_cast<std::size_t>(y)] += cnt[static_cast<std::size_t>(x)];
    }
    cnt = std::move(nxt);
  }
  return std::accumulate(cnt.begin(), cnt.end(), 0.0);
}

FiberCover FiberCover::letter_partition(const Driver& d, int alphabet) {
  FiberCover u;
  std::vector<int> all;
  for (int i = 0; i < d.size; ++i) all.push_back(i);
  for (int x = 0; x < alphabet; ++x)
    u.elements.push_back({all, Window::singleton(Pt{0}), {Word{x}}, false});
  return u;
}

FiberCover FiberCover::letter_complements(const Driver& d, int alphabet) {
  FiberCover u = letter_partition(d, alphabet);
  for (auto& e : u.elements) e.complement = true;
  return u;
}

namespace {

struct CanonCover {
  std::vector<FiberCoverElement> elems;
  Coord w_lo{0}, w_hi{0};
};

CanonCover canonicalize(const RandomSFT& sys, const FiberCover& u) {
  if (u.elements.empty()) throw validation_error("cover has no elements");
  CanonCover cc;
  bool first = true;
  for (const FiberCoverElement& e : u.elements) {
    require_1d(e.window);
    if (e.window.size() == 0) throw validation_error("cover element window is empty");
    FiberCoverElement c = e;
    c.omega_set = canon_set(c.omega_set);
    for (int w : c.omega_set)
      if (w < 0 || w >= sys.driver.size)
        throw validation_error("cover element names a driver point out of range");
    for (const Word& wd : c.words) {
      if (wd.size() != e.window.size())
        throw validation_error("cover word length disagrees with its window");
      for (int x : wd)
        if (x < 0 || x >= sys.alphabet)
          throw validation_error("cover word uses a letter outside the alphabet");
    }
    c.words = canon_words(c.words);
    if (first || e.window.min1() < cc.w_lo) cc.w_lo = e.window.min1();
    if (first || e.window.max1() > cc.w_hi) cc.w_hi = e.window.max1();
    first = false;
    cc.elems.push_back(std::move(c));
  }
  return cc;
}

// Word membership in one element's slice at base point omega_g.
bool slice_contains(const FiberCoverElement& e, int omega_g, const Word& hull_word,
                    Coord hull_lo, Coord g) {
  bool on = std::binary_search(e.omega_set.begin(), e.omega_set.end(), omega_g);
  if (!on) return e.complement;  // off-set: empty slice, or the whole fiber
  Word pat;
  for (const Pt& p : e.window.points())
    pat.push_back(hull_word[static_cast<std::size_t>(g + p[0] - hull_lo)]);
  bool in = std::binary_search(e.words.begin(), e.words.end(), pat);
  return e.complement ? !in : in;
}

using Mask = std::vector<std::uint64_t>;

Mask full_mask(std::size_t n) {
  Mask m((n + 63) / 64, ~0ULL);
  if (n % 64) m.back() = (1ULL << (n % 64)) - 1;
  return m;
}

bool mask_empty(const Mask& m) {
  for (std::uint64_t x : m)
    if (x) return false;
  return true;
}

}  // namespace

PullbackCover pullback_cover(const RandomSFT& sys, const FiberCover& u, int omega,
                             const Window& f, long long max_elements) {
  require_1d(f);
  if (f.size() == 0) throw validation_error("pullback window is empty");
  if (max_elements <= 0) max_elements = enum_limit();
  CanonCover cc = canonicalize(sys, u);
  PullbackCover pb;
  Coord lo = f.min1() + cc.w_lo, hi = f.max1() + cc.w_hi;
  pb.hull = Window::interval(lo, hi);
  pb.words = hull_language(sys, omega, lo, hi);
  std::size_t nw = pb.words.size();

  std::vector<Mask> cur{full_mask(nw)};
  for (const Pt& gp : f.points()) {
    Coord g = gp[0];
    int omega_g = sys.driver.power(omega, g);
    std::vector<Mask> slices;
    Mask covered(full_mask(nw).size(), 0);
    for (const FiberCoverElement& e : cc.elems) {
      Mask m(covered.size(), 0);
      bool any = false;
      for (std::size_t i = 0; i < nw; ++i)
        if (slice_contains(e, omega_g, pb.words[i], lo, g)) {
          m[i / 64] |= 1ULL << (i % 64);
          any = true;
        }
      for (std::size_t k = 0; k < m.size(); ++k) covered[k] |= m[k];
      if (any) slices.push_back(std::move(m));
    }
    if (covered != full_mask(nw))
      throw validation_error("cover misses fiber words at driver point " +
                             std::to_string(omega_g));
    std::set<Mask> next;
    for (const Mask& c : cur)
      for (const Mask& s : slices) {
        Mask inter(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) inter[k] = c[k] & s[k];
        if (!mask_empty(inter)) next.insert(std::move(inter));
      }
    if (static_cast<long long>(next.size()) > max_elements)
      throw bound_error("pullback join produced more than " + std::to_string(max_elements) +
                        " elements");
    cur.assign(next.begin(), next.end());
  }

  for (const Mask& m : cur) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < nw; ++i)
      if (m[i / 64] >> (i % 64) & 1) idx.push_back(static_cast<int>(i));
    pb.elements.push_back(std::move(idx));
  }
  std::sort(pb.elements.begin(), pb.elements.end());
  return pb;
}

namespace {

// Letter-partition detection: every element reads one coordinate and at each
// base point the applicable slices split the core letters exactly.
bool is_letter_partition(const RandomSFT& sys, const CanonCover& cc,
                         std::vector<std::vector<std::uint64_t>>* letters_out) {
  if (sys.alphabet > 60) return false;
  for (const auto& e : cc.elems) {
    if (e.window.size() != 1 || e.window.min1() != 0) return false;
  }
  int m = sys.driver.size;
  letters_out->assign(static_cast<std::size_t>(m),
                      std::vector<std::uint64_t>(cc.elems.size(), 0));
  for (int w = 0; w < m; ++w) {
    std::uint64_t core_mask = 0;
    for (int x = 0; x < sys.alphabet; ++x)
      if (sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)])
        core_mask |= 1ULL << x;
    std::uint64_t seen = 0;
    for (std::size_t j = 0; j < cc.elems.size(); ++j) {
      const auto& e = cc.elems[j];
      bool on = std::binary_search(e.omega_set.begin(), e.omega_set.end(), w);
      std::uint64_t lm = 0;
      if (on || e.complement) {
        if (on) {
          for (const Word& wd : e.words) lm |= 1ULL << wd[0];
          if (e.complement) lm = ~lm;
        } else {
          lm = ~0ULL;  // complement element off its set: whole fiber
        }
      }
      lm &= core_mask;
      if (lm & seen) return false;  // overlap: not a partition
      seen |= lm;
      (*letters_out)[static_cast<std::size_t>(w)][j] = lm;
    }
    if (seen != core_mask) return false;
  }
  return true;
}

// Distinct label strings of fiber words on f, counted by subset states.
unsigned long long count_label_strings(const RandomSFT& sys, int omega, const Window& f,
                                       const std::vector<std::vector<std::uint64_t>>& letters) {
  Coord lo = f.min1(), hi = f.max1();
  HullView hv(sys, omega, lo, hi);
  std::set<Coord> in_f;
  for (const Pt& p : f.points()) in_f.insert(p[0]);

  auto core_mask_at = [&](int i) {
    std::uint64_t cm = 0;
    for (int x = 0; x < sys.alphabet; ++x)
      if (hv.in_core(i, x)) cm |= 1ULL << x;
    return cm;
  };

  std::map<std::uint64_t, unsigned long long> states;
  std::uint64_t cm0 = core_mask_at(0);
  if (in_f.count(lo)) {
    for (std::uint64_t lm : letters[static_cast<std::size_t>(hv.base[0])]) {
      std::uint64_t s = cm0 & lm;
      if (s) states[s] += 1;
    }
  } else {
    states[cm0] = 1;
  }
  for (int i = 1; i < hv.len(); ++i) {
    std::uint64_t cm = core_mask_at(i);
    std::map<std::uint64_t, unsigned long long> next;
    for (const auto& [s, cnt] : states) {
      std::uint64_t t = 0;
      for (int y = 0; y < sys.alphabet; ++y) {
        if (!(cm >> y & 1)) continue;
        bool reach = false;
        for (int x = 0; x < sys.alphabet && !reach; ++x)
          reach = (s >> x & 1) && hv.edge(i - 1, x, y);
        if (reach) t |= 1ULL << y;
      }
      if (!t) continue;
      if (in_f.count(lo + i)) {
        for (std::uint64_t lm : letters[static_cast<std::size_t>(hv.base[static_cast<std::size_t>(i)])]) {
          std::uint64_t s2 = t & lm;
          if (s2) next[s2] += cnt;
        }
      } else {
        next[t] += cnt;
      }
    }
    states = std::move(next);
  }
  unsigned long long total = 0;
  for (const auto& [s, cnt] : states) total += cnt;
  return total;
}

}  // namespace

bool cover_is_letter_partition(const RandomSFT& sys, const FiberCover& u,
                               std::vector<std::vector<std::uint64_t>>* letters) {
  CanonCover cc = canonicalize(sys, u);
  std::vector<std::vector<std::uint64_t>> local;
  return is_letter_partition(sys, cc, letters ? letters : &local);
}

SubcoverResult min_subcover(const RandomSFT& sys, const FiberCover& u, int omega,
                            const Window& f, int max_elements) {
  require_1d(f);
  if (f.size() == 0) return {1, false, {}};
  CanonCover cc = canonicalize(sys, u);
  std::vector<std::vector<std::uint64_t>> letters;
  if (is_letter_partition(sys, cc, &letters)) {
    unsigned long long n = count_label_strings(sys, omega, f, letters);
    return {static_cast<long long>(n), true, {}};
  }

  PullbackCover pb = pullback_cover(sys, u, omega, f);
  int ne = static_cast<int>(pb.elements.size());
  if (ne > max_elements)
    throw bound_error("pullback cover has " + std::to_string(ne) +
                      " elements; exact set cover is bounded at " +
                      std::to_string(max_elements) + "; use a smaller window");
  std::size_t nw = pb.words.size();
  std::vector<Mask> sets;
  for (const auto& el : pb.elements) {
    Mask m(full_mask(nw).size(), 0);
    for (int i : el) m[static_cast<std::size_t>(i) / 64] |= 1ULL << (i % 64);
    sets.push_back(std::move(m));
  }
  auto popcount = [](const Mask& m) {
    std::size_t c = 0;
    for (std::uint64_t x : m) c += static_cast<std::size_t>(__builtin_popcountll(x));
    return c;
  };
  std::size_t max_set = 0;
  for (const Mask& s : sets) max_set = std::max(max_set, popcount(s));

  // Greedy upper bound: most new coverage first, lowest index on ties.
  Mask uncovered = full_mask(nw);
  std::vector<int> best;
  while (!mask_empty(uncovered)) {
    int pick = -1;
    std::size_t gain = 0;
    for (int j = 0; j < ne; ++j) {
      Mask inter(uncovered.size());
      for (std::size_t k = 0; k < inter.size(); ++k) inter[k] = uncovered[k] & sets[static_cast<std::size_t>(j)][k];
      std::size_t g = popcount(inter);
      if (g > gain) {
        gain = g;
        pick = j;
      }
    }
    best.push_back(pick);
    for (std::size_t k = 0; k < uncovered.size(); ++k)
      uncovered[k] &= ~sets[static_cast<std::size_t>(pick)][k];
  }
  std::sort(best.begin(), best.end());

  // Branch and bound on the lowest uncovered word.
  std::vector<int> chosen;
  auto dfs = [&](auto&& self, const Mask& unc) -> void {
    if (mask_empty(unc)) {
      if (chosen.size() < best.size()) best = chosen;
      return;
    }
    std::size_t need = (popcount(unc) + max_set - 1) / max_set;
    if (chosen.size() + need >= best.size()) return;
    std::size_t word = 0;
    for (std::size_t k = 0; k < unc.size(); ++k)
      if (unc[k]) {
        word = k * 64 + static_cast<std::size_t>(__builtin_ctzll(unc[k]));
        break;
      }
    for (int j = 0; j < ne; ++j) {
      if (!(sets[static_cast<std::size_t>(j)][word / 64] >> (word % 64) & 1)) continue;
      Mask rest(unc.size());
      for (std::size_t k = 0; k < unc.size(); ++k)
        rest[k] = unc[k] & ~sets[static_cast<std::size_t>(j)][k];
      chosen.push_back(j);
      self(self, rest);
      chosen.pop_back();
    }
  };
  dfs(dfs, full_mask(nw));
  std::sort(best.begin(), best.end());
  return {static_cast<long long>(best.size()), false, best};
}

EstimateReport build_estimate_report(std::vector<EstimateRow> rows, const FolnerSequence& seq,
                                     bool with_sup) {
  EstimateReport rep;
  double inf = 0;
  double prev_total = 0, prev_sup = 0;
  long long prev_size = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EstimateRow& r = rows[i];
    r.normalized = r.total / static_cast<double>(r.window_size);
    r.increment = (r.total - prev_total) / static_cast<double>(r.window_size - prev_size);
    inf = (i == 0) ? r.normalized : std::min(inf, r.normalized);
    r.inf_so_far = inf;
    if (with_sup) {
      r.sup_normalized = r.sup_total / static_cast<double>(r.window_size);
      if (i + 1 == rows.size())
        rep.sup_estimate = (r.sup_total - prev_sup) / static_cast<double>(r.window_size - prev_size);
    }
    prev_total = r.total;
    prev_sup = r.sup_total;
    prev_size = r.window_size;
  }
  rep.estimate = rows.empty() ? 0.0 : rows.back().increment;
  if (seq.tiling() && !rows.empty()) rep.inf_normalized = rows.back().inf_so_far;
  rep.rows = std::move(rows);
  return rep;
}

EstimateReport fiber_topological_entropy(const RandomSFT& sys, const FiberCover& u,
                                         const FolnerSequence& seq, int n_max,
                                         int subcover_bound) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  if (seq.dim() != 1) throw validation_error("bundle windows are one-dimensional");
  std::vector<EstimateRow> rows(static_cast<std::size_t>(n_max));
  par::for_index(static_cast<std::size_t>(n_max), [&](std::size_t i) {
    Window fn = seq.window(static_cast<int>(i) + 1);
    double total = 0;
    for (int w = 0; w < sys.driver.size; ++w) {
      double p = sys.driver.weights[static_cast<std::size_t>(w)];
      if (p == 0) continue;
      total += p * std::log(static_cast<double>(min_subcover(sys, u, w, fn, subcover_bound).count));
    }
    rows[i] = EstimateRow{static_cast<int>(i) + 1, static_cast<long long>(fn.size()), total,
                          0, 0, 0, 0, 0};
  });
  return build_estimate_report(std::move(rows), seq, false);
}

PotentialFamily PotentialFamily::zero() {
  PotentialFamily d;
  d.kind = Kind::additive;
  d.declared = PropertyFlags{true, true, true, true, true};
  d.certified = true;
  return d;
}

PotentialFamily PotentialFamily::additive(std::vector<std::vector<double>> site) {
  PotentialFamily d;
  d.kind = Kind::additive;
  d.site = std::move(site);
  bool nonneg = true;
  for (const auto& row : d.site)
    for (double v : row) nonneg = nonneg && v >= 0;
  d.declared = PropertyFlags{nonneg, nonneg, true, true, true};
  d.certified = true;
  return d;
}

PotentialFamily PotentialFamily::additive_plus_sqrt(std::vector<std::vector<double>> site) {
  // sqrt(|F|) is itself monotone nonnegative invariant strongly sub-additive,
  // so the additive flags carry over unchanged.
  PotentialFamily d = additive(std::move(site));
  d.kind = Kind::additive_plus_sqrt;
  return d;
}

PotentialFamily PotentialFamily::custom(
    std::function<double(int, const Word&, const Window&)> eval, PropertyFlags declared) {
  PotentialFamily d;
  d.kind = Kind::custom;
  d.eval = std::move(eval);
  d.declared = declared;
  d.certified = false;
  return d;
}

double PotentialFamily::value(const Driver& drv, int omega, const Word& w,
                              const Window& f) const {
  if (f.size() == 0) return 0.0;
  if (kind == Kind::custom) return eval(omega, w, f);
  double s = 0;
  if (!site.empty()) {
    Coord lo = f.min1();
    for (const Pt& p : f.points()) {
      int wg = drv.power(omega, p[0]);
      int letter = w[static_cast<std::size_t>(p[0] - lo)];
      s += site[static_cast<std::size_t>(wg)][static_cast<std::size_t>(letter)];
    }
  }
  if (kind == Kind::additive_plus_sqrt) s += std::sqrt(static_cast<double>(f.size()));
  return s;
}

namespace {

void validate_site(const RandomSFT& sys, const PotentialFamily& d) {
  if (d.kind == PotentialFamily::Kind::custom || d.site.empty()) return;
  if (static_cast<int>(d.site.size()) != sys.driver.size)
    throw validation_error("potential site table needs one row per driver point");
  for (const auto& row : d.site)
    if (static_cast<int>(row.size()) != sys.alphabet)
      throw validation_error("potential site table row length disagrees with alphabet");
}

Window random_subwindow(std::mt19937_64& rng, Coord lo, Coord hi, int max_size) {
  std::vector<Pt> pts;
  int want = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_size));
  std::vector<Coord> range;
  for (Coord c = lo; c <= hi; ++c) range.push_back(c);
  std::shuffle(range.begin(), range.end(), rng);
  for (int i = 0; i < want && i < static_cast<int>(range.size()); ++i)
    pts.push_back(Pt{range[static_cast<std::size_t>(i)]});
  return Window(1, std::move(pts));
}

Word random_word(std::mt19937_64& rng, int alphabet, std::size_t len) {
  Word w(len);
  for (auto& x : w) x = static_cast<int>(rng() % static_cast<std::uint64_t>(alphabet));
  return w;
}

Word slice_to_hull(const Word& w, Coord w_lo, const Window& f) {
  Word out;
  for (Coord c = f.min1(); c <= f.max1(); ++c)
    out.push_back(w[static_cast<std::size_t>(c - w_lo)]);
  return out;
}

}  // namespace

PotentialCheck certify_potential(const RandomSFT& sys, PotentialFamily& d, std::uint64_t seed,
                                 int samples) {
  validate_site(sys, d);
  if (d.kind != PotentialFamily::Kind::custom) {
    d.certified = true;
    return {true, "additive family is exact by construction"};
  }
  std::mt19937_64 rng(seed);
  const Driver& drv = sys.driver;
  auto fail = [&](const std::string& what) {
    d.certified = false;
    return PotentialCheck{false, what};
  };
  for (int it = 0; it < samples; ++it) {
    Window e = random_subwindow(rng, 0, 5, 4);
    Window f = random_subwindow(rng, 0, 5, 4);
    Window uni = window_union(e, f);
    Word w = random_word(rng, sys.alphabet,
                         static_cast<std::size_t>(uni.max1() - uni.min1() + 1));
    int omega = static_cast<int>(rng() % static_cast<std::uint64_t>(drv.size));
    double vu = d.value(drv, omega, w, uni);
    double ve = d.value(drv, omega, slice_to_hull(w, uni.min1(), e), e);
    double vf = d.value(drv, omega, slice_to_hull(w, uni.min1(), f), f);
    if (d.declared.nonnegative && vu < -1e-9) return fail("nonnegative fails");
    if (d.declared.monotone && window_subset(e, f)) {
      if (ve > vf + 1e-9) return fail("monotone fails");
    }
    Window inter = window_intersection(e, f);
    if (inter.size() == 0) {
      if (d.declared.subadditive && vu > ve + vf + 1e-9) return fail("sub-additive fails");
    } else if (d.declared.strongly_subadditive) {
      double vi = d.value(drv, omega, slice_to_hull(w, uni.min1(), inter), inter);
      if (vu + vi > ve + vf + 1e-9) return fail("strongly sub-additive fails");
    }
    if (d.declared.invariant) {
      Coord t = static_cast<Coord>(rng() % 7) - 3;
      Window ft = translate(f, Pt{t});
      Word wf = slice_to_hull(w, uni.min1(), f);
      double a = d.value(drv, omega, wf, ft);
      double b = d.value(drv, drv.power(omega, t), wf, f);
      if (std::abs(a - b) > 1e-9) return fail("invariance fails");
    }
  }
  d.certified = true;
  return {true, "declared flags verified on " + std::to_string(samples) + " samples"};
}

namespace {

// Minimum over admissible partitions of the shifted cell-sup sum; returns
// log of the minimum plus the shift.
double log_pressure_impl(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                         int omega, const Window& f, long long max_partitions) {
  validate_site(sys, d);
  if (d.kind == PotentialFamily::Kind::custom && !d.eval)
    throw validation_error("custom potential has no evaluator");
  if (f.size() == 0) return 0.0;
  PullbackCover pb = pullback_cover(sys, u, omega, f);
  std::size_t nw = pb.words.size();
  Coord hull_lo = pb.hull.min1();
  std::vector<double> dv(nw);
  for (std::size_t i = 0; i < nw; ++i)
    dv[i] = d.value(sys.driver, omega, slice_to_hull(pb.words[i], hull_lo, f), f);
  double shift = *std::max_element(dv.begin(), dv.end());

  Cover cov = make_cover(static_cast<int>(nw), pb.elements);
  std::vector<Partition> parts =
      admissible_partitions(static_cast<int>(nw), cov,
                            max_partitions > 0 ? max_partitions : 0);
  double best = -1;
  for (const Partition& p : parts) {
    double sum = 0;
    for (const auto& block : p.blocks) {
      double mx = dv[static_cast<std::size_t>(block[0])];
      for (int i : block) mx = std::max(mx, dv[static_cast<std::size_t>(i)]);
      sum += std::exp(mx - shift);
    }
    if (best < 0 || sum < best) best = sum;
  }
  double logp = shift + std::log(best);
  // Any admissible partition has at most one cell per cover element.
  if (logp < shift - 1e-9 ||
      logp > shift + std::log(static_cast<double>(pb.elements.size())) + 1e-9)
    throw std::logic_error("pressure left its certified sandwich");
  return logp;
}

}  // namespace

double fiber_pressure(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                      int omega, const Window& f, long long max_partitions) {
  return std::exp(log_pressure_impl(sys, d, u, omega, f, max_partitions));
}

double log_fiber_pressure(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                          int omega, const Window& f, long long max_partitions) {
  return log_pressure_impl(sys, d, u, omega, f, max_partitions);
}

EstimateReport pressure_estimate(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const FolnerSequence& seq, int n_max,
                                 long long max_partitions) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  if (seq.dim() != 1) throw validation_error("bundle windows are one-dimensional");
  if (d.kind == PotentialFamily::Kind::custom && !d.certified)
    throw validation_error(
        "potential flags are not certified; run certify_potential first");
  std::vector<EstimateRow> rows(static_cast<std::size_t>(n_max));
  par::for_index(static_cast<std::size_t>(n_max), [&](std::size_t i) {
    Window fn = seq.window(static_cast<int>(i) + 1);
    double total = 0, sup_total = 0;
    for (int w = 0; w < sys.driver.size; ++w) {
      double p = sys.driver.weights[static_cast<std::size_t>(w)];
      if (p == 0) continue;
      total += p * log_pressure_impl(sys, d, u, w, fn, max_partitions);
      std::vector<Word> lang = fiber_language(sys, w, Window::interval(fn.min1(), fn.max1()));
      double mx = 0;
      bool first = true;
      for (const Word& wd : lang) {
        double v = d.value(sys.driver, w, slice_to_hull(wd, fn.min1(), fn), fn);
        mx = first ? v : std::max(mx, v);
        first = false;
      }
      sup_total += p * mx;
    }
    rows[i] = EstimateRow{static_cast<int>(i) + 1, static_cast<long long>(fn.size()), total,
                          0, 0, 0, sup_total, 0};
  });
  return build_estimate_report(std::move(rows), seq, true);
}

FiberCover truncate_cover(const RandomSFT& sys, const FiberCover& u,
                          const std::vector<std::vector<int>>& stages, int n) {
  if (n < 1 || n > static_cast<int>(stages.size()))
    throw validation_error("exhaustion stage index out of range");
  std::vector<std::vector<int>> canon;
  for (const auto& s : stages) canon.push_back(canon_set(s));
  for (std::size_t i = 1; i < canon.size(); ++i)
    if (!std::includes(canon[i].begin(), canon[i].end(), canon[i - 1].begin(),
                       canon[i - 1].end()))
      throw validation_error("exhaustion stages are not increasing");
  const std::vector<int>& stage = canon[static_cast<std::size_t>(n - 1)];

  FiberCover out;
  for (const FiberCoverElement& e : u.elements) {
    FiberCoverElement c = e;
    std::vector<int> inter;
    std::vector<int> es = canon_set(e.omega_set);
    std::set_intersection(es.begin(), es.end(), stage.begin(), stage.end(),
                          std::back_inserter(inter));
    if (e.complement) {
      // Off its omega set a complement element is the whole fiber; keep the
      // stage restriction by shrinking only where the slice is proper.
      c.omega_set = inter;
      out.elements.push_back(std::move(c));
      continue;
    }
    if (inter.empty()) continue;
    c.omega_set = std::move(inter);
    out.elements.push_back(std::move(c));
  }
  // Whole-fiber element off the stage: complement of everything on the stage.
  FiberCoverElement rest;
  rest.omega_set = stage;
  rest.window = Window::singleton(Pt{0});
  for (int x = 0; x < sys.alphabet; ++x) rest.words.push_back(Word{x});
  rest.complement = true;
  out.elements.push_back(std::move(rest));
  return out;
}

TruncationCheck truncation_check(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const std::vector<int>& stage,
                                 int omega, const Window& f) {
  FiberCover un = truncate_cover(sys, u, {stage}, 1);
  double lp_full = log_pressure_impl(sys, d, u, omega, f, 0);
  double lp_trunc = log_pressure_impl(sys, d, un, omega, f, 0);
  std::vector<int> st = canon_set(stage);
  double log_bound = 0;
  Window site = Window::singleton(Pt{0});
  for (const Pt& gp : f.points()) {
    int wg = sys.driver.power(omega, gp[0]);
    if (!std::binary_search(st.begin(), st.end(), wg))
      log_bound += std::log(static_cast<double>(min_subcover(sys, u, wg, site).count));
  }
  TruncationCheck out;
  out.ratio = std::exp(lp_full - lp_trunc);
  out.bound = std::exp(log_bound);
  out.holds = lp_full - lp_trunc <= log_bound + 1e-9;
  return out;
}

SetFunction make_fiber_entropy_function(const RandomSFT& sys, FiberCover u,
                                        int subcover_bound) {
  PropertyFlags flags{true, true, true, true, false};
  return SetFunction(
      [sys, u = std::move(u), subcover_bound](const Window& w) {
        double total = 0;
        for (int i = 0; i < sys.driver.size; ++i) {
          double p = sys.driver.weights[static_cast<std::size_t>(i)];
          if (p == 0) continue;
          total += p * std::log(static_cast<double>(
                           min_subcover(sys, u, i, w, subcover_bound).count));
        }
        return total;
      },
      flags);
}

SetFunction make_log_pressure_function(const RandomSFT& sys, PotentialFamily d, FiberCover u,
                                       long long max_partitions) {
  PropertyFlags flags{d.declared.monotone, d.declared.nonnegative, true, true, false};
  return SetFunction(
      [sys, d = std::move(d), u = std::move(u), max_partitions](const Window& w) {
        double total = 0;
        for (int i = 0; i < sys.driver.size; ++i) {
          double p = sys.driver.weights[static_cast<std::size_t>(i)];
          if (p == 0) continue;
          total += p * log_pressure_impl(sys, d, u, i, w, max_partitions);
        }
        return total;
      },
      flags);
}

}  // namespace amentropy
