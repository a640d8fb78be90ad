#include "amentropy/subadditive.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <unordered_map>

#include "amentropy/quasitile.hpp"

namespace amentropy {

struct SetFunction::Memo {
  std::unordered_map<std::string, double> values;
  std::shared_mutex mu;
};

SetFunction::SetFunction(std::function<double(const Window&)> eval, PropertyFlags declared)
    : eval_(std::move(eval)), declared_(declared), memo_(std::make_shared<Memo>()) {}

double SetFunction::operator()(const Window& w) const {
  if (w.is_empty()) return 0.0;
  std::string k = w.key();
  {
    std::shared_lock lk(memo_->mu);
    if (auto it = memo_->values.find(k); it != memo_->values.end()) return it->second;
  }
  double v = eval_(w);
  std::unique_lock lk(memo_->mu);
  memo_->values.emplace(std::move(k), v);
  return v;
}

bool PropertyReport::all_declared_pass() const {
  for (const auto& it : items)
    if (it.declared && !it.passed) return false;
  return true;
}

namespace {

constexpr double kTol = 1e-9;

Window window_from_mask(std::uint64_t mask) {
  std::vector<Pt> pts;
  for (int b = 0; mask >> b; ++b)
    if ((mask >> b) & 1u) pts.push_back({b});
  return Window(1, std::move(pts));
}

struct PairViolation {
  std::uint64_t e_mask;
  std::uint64_t f_mask;
};

// Exhaustive d=1 property checks over all nonempty subsets of
// {0..size_bound}, working on bitmasks with a precomputed value table.
PropertyReport check_exhaustive(SetFunction& f, int size_bound) {
  int bits = size_bound + 1;
  std::uint64_t count = (1ull << bits);  // masks 1..count-1 are nonempty
  std::vector<double> val(count, 0.0);
  par::for_index(static_cast<std::int64_t>(count - 1), [&](std::int64_t i) {
    std::uint64_t m = static_cast<std::uint64_t>(i) + 1;
    val[m] = f(window_from_mask(m));
  });

  const PropertyFlags& dec = f.declared();
  PropertyReport rep;
  rep.exhaustive = true;
  rep.pairs_checked = static_cast<long long>((count - 1) * (count - 1));

  auto scan_pairs = [&](const std::function<bool(std::uint64_t, std::uint64_t)>& violates)
      -> std::optional<PairViolation> {
    std::vector<std::uint64_t> first_bad(count, 0);
    par::for_index(static_cast<std::int64_t>(count - 1), [&](std::int64_t i) {
      std::uint64_t e = static_cast<std::uint64_t>(i) + 1;
      for (std::uint64_t ff = 1; ff < count; ++ff) {
        if (violates(e, ff)) {
          first_bad[e] = ff;
          return;
        }
      }
    });
    for (std::uint64_t e = 1; e < count; ++e)
      if (first_bad[e]) return PairViolation{e, first_bad[e]};
    return std::nullopt;
  };

  auto add_item = [&](const std::string& name, bool declared,
                      const std::optional<PairViolation>& bad) {
    PropertyCheckItem item;
    item.name = name;
    item.declared = declared;
    item.passed = !bad.has_value();
    if (bad)
      item.witness = std::make_pair(window_from_mask(bad->e_mask), window_from_mask(bad->f_mask));
    rep.items.push_back(std::move(item));
  };

  if (dec.nonnegative) {
    std::optional<PairViolation> bad;
    for (std::uint64_t m = 1; m < count && !bad; ++m)
      if (val[m] < -kTol) bad = PairViolation{m, m};
    add_item("nonnegative", true, bad);
  }
  if (dec.monotone) {
    add_item("monotone", true, scan_pairs([&](std::uint64_t e, std::uint64_t ff) {
               return (e & ff) == e && val[e] > val[ff] + kTol;
             }));
  }
  if (dec.invariant) {
    // Shifts keep d=1 windows exact; compare against direct evaluation.
    std::optional<PairViolation> bad;
    for (std::uint64_t m = 1; m < count && !bad; ++m) {
      Window w = window_from_mask(m);
      for (Coord g : {-1, 1, 7}) {
        double shifted = f(translate(w, {g}));
        if (std::fabs(shifted - val[m]) > kTol) {
          bad = PairViolation{m, m};
          break;
        }
      }
    }
    add_item("invariant", true, bad);
  }
  if (dec.subadditive) {
    add_item("subadditive", true, scan_pairs([&](std::uint64_t e, std::uint64_t ff) {
               return val[e | ff] > val[e] + val[ff] + kTol;
             }));
  }
  if (dec.strongly_subadditive) {
    add_item("strongly_subadditive", true, scan_pairs([&](std::uint64_t e, std::uint64_t ff) {
               return val[e & ff] + val[e | ff] > val[e] + val[ff] + kTol;
             }));
  }
  return rep;
}

Window random_window(std::mt19937_64& rng, int size_bound) {
  std::size_t n = 1 + rng() % static_cast<std::uint64_t>(size_bound);
  std::vector<Pt> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({static_cast<Coord>(rng() % (2 * static_cast<std::uint64_t>(size_bound)))});
  return Window(1, std::move(pts));
}

PropertyReport check_sampled(SetFunction& f, int size_bound, long long samples,
                             std::uint64_t seed) {
  const PropertyFlags& dec = f.declared();
  PropertyReport rep;
  rep.exhaustive = false;
  rep.pairs_checked = samples;

  // Pre-draw the sample pairs so evaluation order cannot affect results.
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Window, Window>> pairs;
  pairs.reserve(static_cast<std::size_t>(samples));
  for (long long i = 0; i < samples; ++i)
    pairs.emplace_back(random_window(rng, size_bound), random_window(rng, size_bound));

  struct Verdict {
    std::uint8_t nonneg{0}, mono{0}, inv{0}, sub{0}, strong{0};
  };
  std::vector<Verdict> verdicts(pairs.size());
  par::for_index(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t i) {
    const auto& [e, w] = pairs[static_cast<std::size_t>(i)];
    Verdict& v = verdicts[static_cast<std::size_t>(i)];
    double fe = f(e), fw = f(w);
    if (dec.nonnegative && (fe < -kTol || fw < -kTol)) v.nonneg = 1;
    if (dec.monotone) {
      Window u = window_union(e, w);
      if (fe > f(u) + kTol || fw > f(u) + kTol) v.mono = 1;
    }
    if (dec.invariant) {
      for (Coord g : {-3, 1, 11})
        if (std::fabs(f(translate(e, {g})) - fe) > kTol) v.inv = 1;
    }
    if (dec.subadditive && f(window_union(e, w)) > fe + fw + kTol) v.sub = 1;
    if (dec.strongly_subadditive &&
        f(window_intersection(e, w)) + f(window_union(e, w)) > fe + fw + kTol)
      v.strong = 1;
  });

  auto add_item = [&](const std::string& name, auto member) {
    PropertyCheckItem item;
    item.name = name;
    item.declared = true;
    item.passed = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (verdicts[i].*member) {
        item.passed = false;
        if (name == "monotone") {
          item.witness = std::make_pair(pairs[i].first, window_union(pairs[i].first, pairs[i].second));
        } else {
          item.witness = pairs[i];
        }
        break;
      }
    }
    rep.items.push_back(std::move(item));
  };

  if (dec.nonnegative) add_item("nonnegative", &Verdict::nonneg);
  if (dec.monotone) add_item("monotone", &Verdict::mono);
  if (dec.invariant) add_item("invariant", &Verdict::inv);
  if (dec.subadditive) add_item("subadditive", &Verdict::sub);
  if (dec.strongly_subadditive) add_item("strongly_subadditive", &Verdict::strong);
  return rep;
}

}  // namespace

PropertyReport check_properties(SetFunction& f, int size_bound, long long samples,
                                std::uint64_t seed) {
  if (size_bound < 2) throw validation_error("check_properties: size_bound must be >= 2");
  PropertyReport rep;
  std::uint64_t count = 1ull << (size_bound + 1);
  if (size_bound <= 9 &&
      static_cast<long long>(count) * static_cast<long long>(count) <= enum_limit() * 8)
    rep = check_exhaustive(f, size_bound);
  else
    rep = check_sampled(f, size_bound, samples, seed);

  PropertyFlags cert;
  auto passed = [&](const std::string& name) {
    for (const auto& it : rep.items)
      if (it.name == name) return it.passed;
    return false;
  };
  const PropertyFlags& dec = f.declared();
  cert.monotone = dec.monotone && passed("monotone");
  cert.nonnegative = dec.nonnegative && passed("nonnegative");
  cert.invariant = dec.invariant && passed("invariant");
  cert.subadditive = dec.subadditive && passed("subadditive");
  cert.strongly_subadditive = dec.strongly_subadditive && passed("strongly_subadditive");
  f.set_certified(cert);
  return rep;
}

namespace {

// Exact maximum packing count by branch and bound: always decide the
// lowest undecided cell (cover it with an admissible translate or waste
// it), prune with count + free/|S|, memoize the near-frontier occupancy.
class PackingSearch {
public:
  PackingSearch(const Window& e, const Window& s) {
    for (const Pt& p : e.points()) cells_.push_back(p[0]);
    Coord base = s.points().front()[0];
    for (const Pt& p : s.points()) offsets_.push_back(p[0] - base);
    span_ = offsets_.back();
    n_ = static_cast<int>(cells_.size());
    for (int i = 0; i < n_; ++i) index_[cells_[i]] = i;

    // Valid anchor masks keyed by the anchor's lowest cell index.
    anchor_masks_.assign(static_cast<std::size_t>(n_), {});
    for (int i = 0; i < n_; ++i) {
      Coord q = cells_[i];
      std::uint64_t mask = 0;
      bool ok = true;
      for (Coord off : offsets_) {
        auto it = index_.find(q + off);
        if (it == index_.end()) {
          ok = false;
          break;
        }
        mask |= 1ull << it->second;
      }
      if (ok) anchor_masks_[static_cast<std::size_t>(i)].push_back(mask);
    }
    // An anchor covering cell c may start below c; collect by lowest bit.
    by_lowest_.assign(static_cast<std::size_t>(n_), {});
    for (const auto& group : anchor_masks_)
      for (std::uint64_t m : group) {
        int low = std::countr_zero(m);
        by_lowest_[static_cast<std::size_t>(low)].push_back(m);
      }
    use_memo_ = span_ <= 20;
  }

  long long run() {
    best_ = greedy();
    dfs(0, 0, 0);
    return best_;
  }

private:
  long long greedy() const {
    std::uint64_t occ = 0;
    long long cnt = 0;
    for (int i = 0; i < n_; ++i)
      for (std::uint64_t m : by_lowest_[static_cast<std::size_t>(i)])
        if ((m & occ) == 0) {
          occ |= m;
          ++cnt;
        }
    return cnt;
  }

  void dfs(int from, std::uint64_t blocked, long long count) {
    int c = from;
    while (c < n_ && ((blocked >> c) & 1u)) ++c;
    if (c >= n_) {
      best_ = std::max(best_, count);
      return;
    }
    long long free = n_ - static_cast<long long>(std::popcount(blocked));
    if (count + free / static_cast<long long>(offsets_.size()) <= best_) return;

    std::uint64_t memo_key = 0;
    if (use_memo_) {
      // Cells below c are decided; occupied bits live in [c, c+span].
      memo_key = (static_cast<std::uint64_t>(c) << 40) |
                 ((blocked >> c) & ((1ull << (span_ + 1)) - 1ull));
      auto it = memo_.find(memo_key);
      if (it != memo_.end() && it->second >= count) return;
      memo_[memo_key] = count;
    }

    // Cover cell c with any admissible translate.
    for (std::uint64_t m : by_lowest_[static_cast<std::size_t>(c)])
      if ((m & blocked) == 0) dfs(c + 1, blocked | m, count + 1);
    // Or leave cell c permanently uncovered.
    dfs(c + 1, blocked | (1ull << c), count);
  }

  std::vector<Coord> cells_;
  std::vector<Coord> offsets_;
  std::unordered_map<Coord, int> index_;
  std::vector<std::vector<std::uint64_t>> anchor_masks_;
  std::vector<std::vector<std::uint64_t>> by_lowest_;
  std::unordered_map<std::uint64_t, long long> memo_;
  Coord span_{0};
  int n_{0};
  long long best_{0};
  bool use_memo_{false};
};

}  // namespace

long long packing_deficiency(const Window& e, const Window& s, long long exact_bound) {
  if (s.is_empty()) throw validation_error("packing_deficiency: S must be nonempty");
  if (e.dim() != 1 || s.dim() != 1)
    throw validation_error("packing_deficiency: windows must be 1-dimensional");
  if (e.is_empty()) return 0;
  if (static_cast<long long>(e.size()) > exact_bound)
    throw bound_error("instance too large: |E| = " + std::to_string(e.size()) +
                      " exceeds exact-search bound " + std::to_string(exact_bound));
  PackingSearch search(e, s);
  return static_cast<long long>(e.size()) - search.run();
}

SetFunction make_packing_deficiency(const Window& s, long long exact_bound) {
  PropertyFlags flags;
  flags.monotone = true;
  flags.nonnegative = true;
  flags.invariant = true;
  flags.subadditive = true;
  flags.strongly_subadditive = true;  // refuted by check_properties
  return SetFunction(
      [s, exact_bound](const Window& e) {
        return static_cast<double>(packing_deficiency(e, s, exact_bound));
      },
      flags);
}

SetFunction make_cardinality(double scale) {
  PropertyFlags flags;
  flags.monotone = true;
  flags.nonnegative = scale >= 0.0;
  flags.invariant = true;
  flags.subadditive = true;
  flags.strongly_subadditive = true;
  return SetFunction(
      [scale](const Window& e) { return scale * static_cast<double>(e.size()); }, flags);
}

LimitReport limit_along(const SetFunction& f, const FolnerSequence& seq, long long n_max) {
  const PropertyFlags& c = f.certified();
  bool shape_ok = c.monotone || c.strongly_subadditive || (c.subadditive && seq.tiling());
  if (!(c.invariant && c.subadditive && shape_ok))
    throw validation_error(
        "limit_along: required property flags are not certified "
        "(need invariant + subadditive + one of monotone/strongly_subadditive/"
        "tiling sequence); run check_properties first");
  if (n_max < 1) throw validation_error("limit_along: n_max must be >= 1");
  if (seq.max_n() < n_max)
    throw validation_error("limit_along: sequence has fewer than n_max windows");

  LimitReport rep;
  rep.rows.resize(static_cast<std::size_t>(n_max));
  par::for_index(n_max, [&](std::int64_t i) {
    long long n = i + 1;
    Window fn = seq.window(n);
    double v = f(fn);
    rep.rows[static_cast<std::size_t>(i)] =
        LimitRow{n, v, v / static_cast<double>(fn.size())};
  });
  rep.estimate = rep.rows.back().normalized;
  if (c.strongly_subadditive) {
    double inf = rep.rows.front().normalized;
    for (const auto& r : rep.rows) inf = std::min(inf, r.normalized);
    rep.inf_normalized = inf;
  }
  return rep;
}

InfWindowsResult inf_over_windows(const SetFunction& f, int element_range, int size_bound) {
  if (element_range < 1 || element_range > 62)
    throw validation_error("inf_over_windows: element_range must be in 1..62");
  if (size_bound < 1) throw validation_error("inf_over_windows: size_bound must be >= 1");

  // Enumerate nonempty subsets of {1..range} with |E| <= size_bound,
  // lexicographically by sorted element list, bounded by enum_limit.
  std::vector<std::vector<Coord>> subsets;
  std::vector<Coord> cur;
  auto gen = [&](auto&& self, Coord next) -> void {
    if (!cur.empty()) {
      if (static_cast<long long>(subsets.size()) >= enum_limit())
        throw bound_error("inf_over_windows: enumeration exceeds limit " +
                          std::to_string(enum_limit()));
      subsets.push_back(cur);
    }
    if (static_cast<int>(cur.size()) == size_bound) return;
    for (Coord x = next; x <= element_range; ++x) {
      cur.push_back(x);
      self(self, x + 1);
      cur.pop_back();
    }
  };
  gen(gen, 1);

  std::vector<double> vals(subsets.size(), 0.0);
  par::for_index(static_cast<std::int64_t>(subsets.size()), [&](std::int64_t i) {
    const auto& xs = subsets[static_cast<std::size_t>(i)];
    std::vector<Pt> pts;
    for (Coord x : xs) pts.push_back({x});
    Window e(1, std::move(pts));
    vals[static_cast<std::size_t>(i)] = f(e) / static_cast<double>(e.size());
  });

  std::size_t best_i = 0;
  bool have = false;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    if (!have) {
      have = true;
      best_i = i;
      continue;
    }
    if (vals[i] < vals[best_i] - 1e-12) {
      best_i = i;
    } else if (vals[i] <= vals[best_i] + 1e-12) {
      // Tie: prefer the larger window, then the lexicographically smaller.
      if (subsets[i].size() > subsets[best_i].size() ||
          (subsets[i].size() == subsets[best_i].size() && subsets[i] < subsets[best_i]))
        best_i = i;
    }
  }
  std::vector<Pt> pts;
  for (Coord x : subsets[best_i]) pts.push_back({x});
  return InfWindowsResult{vals[best_i], Window(1, std::move(pts)),
                          static_cast<long long>(subsets.size())};
}

InfTilesResult inf_over_tiles(const SetFunction& f, const std::vector<TilingSpec>& tile_list) {
  const PropertyFlags& c = f.certified();
  if (!(c.invariant && c.subadditive))
    throw validation_error(
        "inf_over_tiles: subadditive and invariant flags are not certified; "
        "run check_properties first");
  if (tile_list.empty()) throw validation_error("inf_over_tiles: empty tile list");

  InfTilesResult out;
  out.per_tile.reserve(tile_list.size());
  bool have = false;
  for (const TilingSpec& spec : tile_list) {
    // Validates disjointness of the translate family.
    (void)tiling_centers(spec, spec.tile);
    double v = f(spec.tile) / static_cast<double>(spec.tile.size());
    out.per_tile.emplace_back(spec.tile, v);
    if (!have || v < out.value) {
      have = true;
      out.value = v;
      out.argmin_tile = spec.tile;
    }
  }
  return out;
}

double decomposition_bound_rhs(const SetFunction& f, const Window& t,
                               const IndicatorDecomposition& d) {
  double rhs = 0.0;
  for (const Pt& g : d.core.points())
    rhs += f(translate(t, g)) / static_cast<double>(d.t_size);
  for (const auto& term : d.terms) rhs += term.coeff.to_double() * f(term.set);
  return rhs;
}

}  // namespace amentropy
