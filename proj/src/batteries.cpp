#include "amentropy/batteries.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "amentropy/bundle.hpp"
#include "amentropy/measures.hpp"
#include "amentropy/quasitile.hpp"
#include "amentropy/simplex.hpp"
#include "amentropy/subadditive.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

namespace {

using Rng = std::mt19937_64;

int rint(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double runif(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Window random_window(Rng& rng, int max_size, int range) {
  int k = rint(rng, 1, max_size);
  Window w = Window::empty(1);
  for (int i = 0; i < k; ++i)
    w = window_union(w, Window::singleton(Pt{static_cast<Coord>(rint(rng, -range, range))}));
  return w;
}

std::vector<double> random_law(Rng& rng, int n) {
  std::vector<double> p(static_cast<std::size_t>(n));
  double s = 0;
  for (double& x : p) {
    x = runif(rng, 0.05, 1.0);
    s += x;
  }
  for (double& x : p) x /= s;
  return p;
}

Partition random_partition(Rng& rng, int n) {
  int k = rint(rng, 1, n);
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) blocks[static_cast<std::size_t>(rint(rng, 0, k - 1))].push_back(i);
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                              [](const std::vector<int>& b) { return b.empty(); }),
               blocks.end());
  return make_partition(n, std::move(blocks));
}

// Random bundle SFT whose fibers are alive: rejection-sample matrices until
// the core construction accepts.
RandomSFT random_system(Rng& rng, int alphabet, int base_size) {
  for (;;) {
    Driver d = base_size == 1 ? Driver::point() : Driver::cycle(base_size);
    std::vector<std::vector<std::vector<int>>> ms;
    for (int w = 0; w < base_size; ++w) {
      std::vector<std::vector<int>> m(static_cast<std::size_t>(alphabet),
                                      std::vector<int>(static_cast<std::size_t>(alphabet), 0));
      for (auto& row : m)
        for (int& x : row) x = rint(rng, 0, 3) > 0 ? 1 : 0;
      ms.push_back(std::move(m));
    }
    try {
      return RandomSFT::make(std::move(d), alphabet, std::move(ms));
    } catch (const validation_error&) {
      continue;
    }
  }
}

std::vector<std::vector<double>> random_site(Rng& rng, const RandomSFT& sys) {
  std::vector<std::vector<double>> site(
      static_cast<std::size_t>(sys.driver.size),
      std::vector<double>(static_cast<std::size_t>(sys.alphabet), 0.0));
  for (auto& row : site)
    for (double& x : row) x = runif(rng, -1.0, 1.0);
  return site;
}

// Every set partition of {0..n-1} via restricted growth strings.
std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  std::vector<int> code(static_cast<std::size_t>(n), 0);
  for (;;) {
    int k = *std::max_element(code.begin(), code.end()) + 1;
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) blocks[static_cast<std::size_t>(code[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(make_partition(n, std::move(blocks)));
    int i = n - 1;
    while (i > 0) {
      int cap = *std::max_element(code.begin(), code.begin() + i) + 1;
      if (code[static_cast<std::size_t>(i)] < cap) break;
      code[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i == 0) break;
    ++code[static_cast<std::size_t>(i)];
  }
  return out;
}

struct Trial {
  bool ok{true};
  std::string detail;
};

BatterySuiteResult run_suite(const std::string& name, long long trials, std::uint64_t seed,
                             const std::function<Trial(Rng&)>& one) {
  BatterySuiteResult r;
  r.name = name;
  r.trials = trials;
  Rng rng(seed);
  for (long long i = 0; i < trials; ++i) {
    Trial t = one(rng);
    if (!t.ok) {
      ++r.failures;
      if (r.detail.empty()) r.detail = "trial " + std::to_string(i) + ": " + t.detail;
    }
  }
  return r;
}

Trial indicator_identity_trial(Rng& rng) {
  Window t = random_window(rng, 4, 6);
  Window e = random_window(rng, 32, 16);
  auto [lhs, rhs] = sum_indicator_identity(t, e);
  if (lhs != rhs) return {false, "double-count sides differ"};
  return {};
}

Trial decomposition_trial(Rng& rng, const RandomSFT& sys, const RelativeMarkovMeasure& mu) {
  // Sample until the window actually contains a full translate of the tile,
  // so the invariant core is nonempty and the decomposition exists.
  Window f = Window::empty(1);
  Window t = Window::empty(1);
  for (;;) {
    f = random_window(rng, 18, 12);
    t = Window::interval(0, static_cast<Coord>(rint(rng, 0, 3)));
    if (!invariant_core(f, t).is_empty()) break;
  }
  IndicatorDecomposition d = indicator_decomposition(f, t);

  PropertyFlags flags;
  flags.nonnegative = flags.invariant = flags.subadditive = flags.strongly_subadditive = true;
  SetFunction card = make_cardinality();
  SetFunction went([&](const Window& w) { return window_entropy(sys, mu, 0, w); }, flags);

  double fcard = card(f), rcard = decomposition_bound_rhs(card, t, d);
  if (fcard > rcard + 1e-9)
    return {false, "cardinality bound violated: " + std::to_string(fcard) + " > " +
                       std::to_string(rcard)};
  double fent = went(f), rent = decomposition_bound_rhs(went, t, d);
  if (fent > rent + 1e-9)
    return {false, "entropy bound violated: " + std::to_string(fent) + " > " +
                       std::to_string(rent)};
  return {};
}

Trial gibbs_trial(Rng& rng) {
  int n = rint(rng, 1, 6);
  std::vector<double> a(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
  for (double& x : a) x = runif(rng, -2.0, 2.0);
  double mass = runif(rng, 0.2, 1.0);
  double s = 0;
  for (double& x : p) {
    x = runif(rng, 0.05, 1.0);
    s += x;
  }
  for (double& x : p) x *= mass / s;

  GibbsResult g = gibbs_inequality(a, p);
  if (g.lhs > g.rhs + 1e-12) return {false, "inequality violated"};

  double z = 0;
  for (double x : a) z += std::exp(x);
  std::vector<double> peq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) peq[i] = mass * std::exp(a[i]) / z;
  GibbsResult geq = gibbs_inequality(a, peq);
  if (!geq.equal) return {false, "equality case not recognized"};
  return {};
}

Trial chain_rule_trial(Rng& rng) {
  int n = rint(rng, 2, 8);
  FiniteSpace nu;
  nu.weights = random_law(rng, n);
  nu.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nu.labels[static_cast<std::size_t>(i)] = std::to_string(i);
  Partition alpha = random_partition(rng, n);
  Partition beta = random_partition(rng, n);
  double lhs = entropy(nu, join(alpha, beta));
  double rhs = entropy(nu, beta) + conditional_entropy(nu, alpha, beta);
  if (std::abs(lhs - rhs) > 1e-10) return {false, "chain rule defect " + std::to_string(lhs - rhs)};
  return {};
}

Trial mixture_trial(Rng& rng) {
  int n = rint(rng, 2, 6);
  int k = rint(rng, 2, 4);
  std::vector<FiniteSpace> nus(static_cast<std::size_t>(k));
  for (FiniteSpace& nu : nus) {
    nu.weights = random_law(rng, n);
    nu.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nu.labels[static_cast<std::size_t>(i)] = std::to_string(i);
  }
  std::vector<double> lambda = random_law(rng, k);
  Partition alpha = random_partition(rng, n);
  Partition c = random_partition(rng, n);
  MixtureBounds b = mixture_entropy_bounds(nus, lambda, alpha, c);
  if (b.value < b.lower - 1e-12) return {false, "mixture lower bound violated"};
  if (b.value > b.upper + 1e-12) return {false, "mixture upper bound violated"};
  double hl = 0;
  for (double l : lambda) hl -= l * std::log(l);
  if (std::abs((b.upper - b.lower) - hl) > 1e-12)
    return {false, "upper-lower gap is not the mixing entropy"};
  return {};
}

Trial affinity_trial(Rng& rng, const RandomSFT& sys) {
  // Shared block-diagonal kernel; the initial laws differ, so rates must
  // combine affinely and exactly.
  double a01 = runif(rng, 0.1, 0.9), a10 = runif(rng, 0.1, 0.9);
  double b01 = runif(rng, 0.1, 0.9), b10 = runif(rng, 0.1, 0.9);
  std::vector<std::vector<double>> q = {{1 - a01, a01, 0, 0},
                                        {a10, 1 - a10, 0, 0},
                                        {0, 0, 1 - b01, b01},
                                        {0, 0, b10, 1 - b10}};
  double za = a01 + a10, zb = b01 + b10;
  std::vector<double> piA = {a10 / za, a01 / za, 0, 0};
  std::vector<double> piB = {0, 0, b10 / zb, b01 / zb};
  double lam = runif(rng, 0.1, 0.9);
  std::vector<double> piM(4);
  for (int i = 0; i < 4; ++i)
    piM[static_cast<std::size_t>(i)] =
        lam * piA[static_cast<std::size_t>(i)] + (1 - lam) * piB[static_cast<std::size_t>(i)];

  RelativeMarkovMeasure muA{{piA}, {q}}, muB{{piB}, {q}}, muM{{piM}, {q}};
  muA.validate(sys);
  muB.validate(sys);
  muM.validate(sys);
  double mix = markov_entropy_rate(sys, muM);
  double combo = lam * markov_entropy_rate(sys, muA) + (1 - lam) * markov_entropy_rate(sys, muB);
  if (std::abs(mix - combo) > 1e-9)
    return {false, "affinity defect " + std::to_string(mix - combo)};
  return {};
}

Trial sandwich_trial(Rng& rng) {
  RandomSFT sys = random_system(rng, rint(rng, 2, 3), rint(rng, 1, 2));
  PotentialFamily d = PotentialFamily::additive(random_site(rng, sys));
  FiberCover u = FiberCover::letter_partition(sys.driver, sys.alphabet);
  EstimateReport pr = pressure_estimate(sys, d, u, FolnerSequence::boxes(1), 4);
  EstimateReport ht = fiber_topological_entropy(sys, u, FolnerSequence::boxes(1), 4);
  for (std::size_t i = 0; i < pr.rows.size(); ++i) {
    double sup = pr.rows[i].sup_total;
    double p = pr.rows[i].total;
    double h = ht.rows[i].total;
    if (sup > p + 1e-9) return {false, "sup exceeds pressure at n=" + std::to_string(i + 1)};
    if (p > h + sup + 1e-9)
      return {false, "pressure exceeds entropy plus sup at n=" + std::to_string(i + 1)};
  }
  return {};
}

Trial truncation_trial(Rng& rng) {
  // The exhaustion stage is a set of base points; off it the truncated
  // cover charges nothing, which the subcover-count bound pays for.
  RandomSFT sys = random_system(rng, 3, 2);
  FiberCover u = FiberCover::letter_partition(sys.driver, sys.alphabet);
  PotentialFamily d = PotentialFamily::additive(random_site(rng, sys));
  std::vector<int> stage;
  for (int w = 0; w < sys.driver.size; ++w)
    if (rint(rng, 0, 1)) stage.push_back(w);
  if (stage.empty()) stage.push_back(rint(rng, 0, sys.driver.size - 1));
  Window f = Window::interval(0, static_cast<Coord>(rint(rng, 0, 2)));
  TruncationCheck c = truncation_check(sys, d, u, stage, 0, f);
  if (!c.holds || c.ratio > c.bound + 1e-12)
    return {false, "truncation ratio " + std::to_string(c.ratio) + " exceeds bound " +
                       std::to_string(c.bound)};
  return {};
}

Trial cover_oracle_trial(Rng& rng) {
  int n = rint(rng, 2, 6);
  FiniteSpace nu;
  nu.weights = random_law(rng, n);
  nu.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nu.labels[static_cast<std::size_t>(i)] = std::to_string(i);

  int e = rint(rng, 2, 4);
  std::vector<std::vector<int>> elements(static_cast<std::size_t>(e));
  for (auto& el : elements) {
    for (int i = 0; i < n; ++i)
      if (rint(rng, 0, 1)) el.push_back(i);
    if (el.empty()) el.push_back(rint(rng, 0, n - 1));
  }
  for (int i = 0; i < n; ++i) {
    bool covered = false;
    for (const auto& el : elements) covered = covered || std::count(el.begin(), el.end(), i);
    if (!covered) elements[static_cast<std::size_t>(rint(rng, 0, e - 1))].push_back(i);
  }
  for (auto& el : elements) std::sort(el.begin(), el.end());
  Cover u = make_cover(n, elements);
  Partition c = Partition::trivial(n);
  double fast = cover_entropy_global(nu, u, c);

  // Independent oracle: minimum entropy over every set partition whose
  // blocks are unions of generated atoms and fit inside a cover element.
  Partition gen = generated_partition(n, u);
  double best = std::numeric_limits<double>::infinity();
  for (const Partition& p : all_partitions(n)) {
    bool ok = true;
    for (const auto& block : p.blocks) {
      bool inside = false;
      for (const auto& el : u.elements)
        if (std::includes(el.begin(), el.end(), block.begin(), block.end())) {
          inside = true;
          break;
        }
      if (!inside) {
        ok = false;
        break;
      }
      for (const auto& atom : gen.blocks) {
        std::vector<int> inter;
        std::set_intersection(atom.begin(), atom.end(), block.begin(), block.end(),
                              std::back_inserter(inter));
        if (!inter.empty() && inter.size() != atom.size()) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) best = std::min(best, entropy(nu, p));
  }
  if (std::abs(fast - best) > 1e-12)
    return {false, "oracle minimum " + std::to_string(best) + " vs " + std::to_string(fast)};
  return {};
}

}  // namespace

std::vector<BatterySuiteResult> run_batteries(long long trials, std::uint64_t seed) {
  if (trials < 1) throw validation_error("battery trial count must be positive");
  std::vector<BatterySuiteResult> out;

  out.push_back(run_suite("indicator_identity", trials, seed + 1,
                          [](Rng& rng) { return indicator_identity_trial(rng); }));

  RandomSFT gm = RandomSFT::deterministic(2, {{1, 1}, {1, 0}});
  RelativeMarkovMeasure parry = parry_measure(gm);
  out.push_back(run_suite("indicator_decomposition", trials, seed + 2, [&](Rng& rng) {
    return decomposition_trial(rng, gm, parry);
  }));

  out.push_back(
      run_suite("gibbs", trials, seed + 3, [](Rng& rng) { return gibbs_trial(rng); }));
  out.push_back(run_suite("chain_rule", trials, seed + 4,
                          [](Rng& rng) { return chain_rule_trial(rng); }));
  out.push_back(run_suite("mixture_bounds", trials, seed + 5,
                          [](Rng& rng) { return mixture_trial(rng); }));

  RandomSFT blocks = RandomSFT::deterministic(
      4, {{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
  out.push_back(run_suite("affinity", trials, seed + 6,
                          [&](Rng& rng) { return affinity_trial(rng, blocks); }));

  out.push_back(run_suite("sandwich", trials, seed + 7,
                          [](Rng& rng) { return sandwich_trial(rng); }));
  out.push_back(run_suite("truncation", trials, seed + 8,
                          [](Rng& rng) { return truncation_trial(rng); }));
  out.push_back(run_suite("cover_oracle", trials, seed + 9,
                          [](Rng& rng) { return cover_oracle_trial(rng); }));
  return out;
}

}  // namespace amentropy
