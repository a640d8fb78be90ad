#include "amentropy/tuples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "amentropy/common.hpp"

namespace amentropy {

namespace {

const char* kCaveat =
    "finite-window estimate: a value above tau is evidence for the tuple, "
    "a value at or below tau does not certify a zero limit";

bool starts_with(const Word& w, const Word& prefix) {
  if (w.size() < prefix.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), w.begin());
}

}  // namespace

void TupleQuery::validate(const RandomSFT& sys) const {
  if (prefixes.size() < 2) throw validation_error("tuple arity must be at least two");
  if (resolution < 1) throw validation_error("resolution must be positive");
  if (!(tau > 0)) throw validation_error("acceptance threshold must be positive");
  for (const Word& p : prefixes) {
    if (p.empty()) throw validation_error("tuple cylinder prefix is empty");
    if (static_cast<int>(p.size()) > resolution)
      throw validation_error("cylinder prefix longer than the resolution window");
    for (int x : p)
      if (x < 0 || x >= sys.alphabet)
        throw validation_error("cylinder letter outside the alphabet");
  }
  for (std::size_t i = 0; i < prefixes.size(); ++i)
    for (std::size_t j = i + 1; j < prefixes.size(); ++j) {
      const Word& a = prefixes[i];
      const Word& b = prefixes[j];
      std::size_t common = std::min(a.size(), b.size());
      bool differ = false;
      for (std::size_t k = 0; k < common; ++k)
        if (a[k] != b[k]) {
          differ = true;
          break;
        }
      if (!differ)
        throw validation_error(
            "tuple cylinders are not pairwise disjoint at the stated resolution");
    }
}

FiberCover complement_cover(const RandomSFT& sys, const TupleQuery& q) {
  q.validate(sys);
  std::vector<int> all;
  all.reserve(static_cast<std::size_t>(sys.driver.size));
  for (int w = 0; w < sys.driver.size; ++w) all.push_back(w);
  FiberCover u;
  for (const Word& p : q.prefixes) {
    FiberCoverElement e;
    e.omega_set = all;
    e.window = Window::interval(0, static_cast<Coord>(p.size()) - 1);
    e.words = {p};
    e.complement = true;
    u.elements.push_back(std::move(e));
  }
  return u;
}

TupleDecision topological_tuple_test(const RandomSFT& sys, const TupleQuery& q,
                                     int subcover_bound) {
  FiberCover u = complement_cover(sys, q);
  EstimateReport rep = fiber_topological_entropy(sys, u, FolnerSequence::boxes(1),
                                                 q.resolution, subcover_bound);
  TupleDecision d;
  d.value = rep.estimate;
  d.accept = d.value > q.tau;
  d.caveat = kCaveat;
  return d;
}

TupleDecision measure_tuple_test(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                 const TupleQuery& q) {
  FiberCover u = complement_cover(sys, q);
  CoverEntropyReport rep =
      fiber_cover_entropy_estimate(sys, mu, u, FolnerSequence::boxes(1), q.resolution);
  TupleDecision d;
  d.value = rep.est.estimate;
  d.accept = d.value > q.tau;
  d.caveat = kCaveat;
  return d;
}

PinskerScenario PinskerScenario::trivial(std::string note) {
  PinskerScenario sc;
  sc.mode = Mode::trivial_factor;
  sc.declared = true;
  sc.note = std::move(note);
  return sc;
}

PinskerScenario PinskerScenario::full(std::string note) {
  PinskerScenario sc;
  sc.mode = Mode::full_factor;
  sc.declared = true;
  sc.note = std::move(note);
  return sc;
}

std::vector<LambdaRow> lambda_n(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                const PinskerScenario& sc, int n, int resolution) {
  if (!sc.declared)
    throw validation_error(
        "pinsker mode not declared for this scenario; refusing to guess the tuple law");
  if (n < 2) throw validation_error("tuple arity must be at least two");
  if (resolution < 1) throw validation_error("resolution must be positive");
  mu.validate(sys);
  Window f = Window::interval(0, resolution - 1);
  std::map<std::vector<Word>, double> acc;
  for (int w = 0; w < sys.driver.size; ++w) {
    double pw = sys.driver.weights[static_cast<std::size_t>(w)];
    if (pw == 0) continue;
    std::vector<Word> lang = fiber_language(sys, w, f);
    std::vector<Word> words;
    std::vector<double> probs;
    for (Word& wd : lang) {
      double p = cylinder_prob(sys, mu, w, wd, 0);
      if (p > 0) {
        words.push_back(std::move(wd));
        probs.push_back(p);
      }
    }
    if (words.empty()) continue;
    if (sc.mode == PinskerScenario::Mode::full_factor) {
      for (std::size_t k = 0; k < words.size(); ++k)
        acc[std::vector<Word>(static_cast<std::size_t>(n), words[k])] += pw * probs[k];
      continue;
    }
    double count = std::pow(static_cast<double>(words.size()), n);
    if (count > static_cast<double>(enum_limit()))
      throw bound_error("tuple product law too large to enumerate; cap is " +
                        std::to_string(enum_limit()));
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      std::vector<Word> key;
      key.reserve(idx.size());
      double mass = pw;
      for (std::size_t i : idx) {
        key.push_back(words[i]);
        mass *= probs[i];
      }
      acc[std::move(key)] += mass;
      std::size_t slot = idx.size();
      while (slot > 0) {
        --slot;
        if (++idx[slot] < words.size()) break;
        idx[slot] = 0;
        if (slot == 0) goto omega_done;
      }
    }
  omega_done:;
  }
  std::vector<LambdaRow> rows;
  rows.reserve(acc.size());
  for (auto& kv : acc)
    if (kv.second > 0) rows.push_back(LambdaRow{kv.first, kv.second});
  return rows;
}

std::vector<std::vector<Word>> tuple_set_from_support(const RandomSFT& sys,
                                                      const RelativeMarkovMeasure& mu,
                                                      const PinskerScenario& sc, int n,
                                                      int resolution) {
  std::vector<std::vector<Word>> out;
  for (LambdaRow& row : lambda_n(sys, mu, sc, n, resolution)) {
    bool all_equal = true;
    for (std::size_t i = 1; i < row.words.size(); ++i)
      if (row.words[i] != row.words[0]) {
        all_equal = false;
        break;
      }
    if (!all_equal) out.push_back(std::move(row.words));
  }
  return out;
}

ProbeReport positivity_equivalence_probe(const RandomSFT& sys,
                                         const RelativeMarkovMeasure& mu,
                                         const TupleQuery& q, const PinskerScenario& sc,
                                         int window_budget) {
  q.validate(sys);
  if (window_budget < 1) throw validation_error("window budget must be positive");
  if (window_budget > 20)
    throw bound_error("window budget too large to enumerate; cap is 20");
  mu.validate(sys);
  FiberCover u = complement_cover(sys, q);

  ProbeReport rep;
  rep.caveat = kCaveat;
  double inf = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << window_budget); ++mask) {
    Window e = Window::empty(1);
    for (int g = 0; g < window_budget; ++g)
      if (mask & (std::uint64_t{1} << g))
        e = window_union(e, Window::singleton(Pt{static_cast<Coord>(g)}));
    double val = fiber_cover_entropy_window(sys, mu, u, e) /
                 static_cast<double>(e.size());
    inf = std::min(inf, val);
  }
  rep.inf_normalized = inf;

  rep.h_estimate = fiber_cover_entropy_estimate(sys, mu, u, FolnerSequence::boxes(1),
                                                window_budget)
                       .est.estimate;

  double mass = 0;
  int arity = static_cast<int>(q.prefixes.size());
  for (const LambdaRow& row : lambda_n(sys, mu, sc, arity, q.resolution)) {
    bool avoids_all = true;
    for (std::size_t i = 0; i < row.words.size(); ++i)
      if (starts_with(row.words[i], q.prefixes[i])) {
        avoids_all = false;
        break;
      }
    if (avoids_all) mass += row.mass;
  }
  rep.lambda_mass = mass;

  rep.inf_positive = rep.inf_normalized > q.tau;
  rep.h_positive = rep.h_estimate > q.tau;
  rep.mass_positive = rep.lambda_mass > 0;
  rep.consistent =
      rep.inf_positive == rep.h_positive && rep.h_positive == rep.mass_positive;
  return rep;
}

}  // namespace amentropy
