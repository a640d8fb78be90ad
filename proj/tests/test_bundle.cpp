#include "amentropy/bundle.hpp"

#include <cmath>
#include <random>

#include "amentropy/simplex.hpp"
#include "doctest.h"

using namespace amentropy;

namespace {

const double kLog2 = std::log(2.0);

RandomSFT full_shift(int alphabet) {
  std::vector<std::vector<int>> m(static_cast<std::size_t>(alphabet),
                                  std::vector<int>(static_cast<std::size_t>(alphabet), 1));
  return RandomSFT::deterministic(alphabet, m);
}

RandomSFT golden_mean() { return RandomSFT::deterministic(2, {{1, 1}, {1, 0}}); }

// Base {0,1} swapped each step; fiber matrix alternates free / identity.
RandomSFT alternating() {
  Driver d;
  d.size = 2;
  d.theta = {1, 0};
  d.weights = {0.5, 0.5};
  return RandomSFT::make(d, 2, {{{1, 1}, {1, 1}}, {{1, 0}, {0, 1}}});
}

std::vector<std::vector<std::vector<int>>> all_word_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  auto emit = [&] {
    int k = 0;
    for (int v : rgs) k = std::max(k, v + 1);
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(blocks));
  };
  auto rec = [&](auto&& self, int i, int maxv) -> void {
    if (i == n) {
      emit();
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      rgs[static_cast<std::size_t>(i)] = v;
      self(self, i + 1, std::max(maxv, v));
    }
  };
  rec(rec, 1, 0);
  return out;
}

bool blocks_refine_elements(const std::vector<std::vector<int>>& blocks,
                            const std::vector<std::vector<int>>& elements) {
  for (const auto& b : blocks) {
    bool hosted = false;
    for (const auto& e : elements)
      if (std::includes(e.begin(), e.end(), b.begin(), b.end())) {
        hosted = true;
        break;
      }
    if (!hosted) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("driver validation and powers") {
  CHECK_THROWS_AS(RandomSFT::make(Driver{2, {0, 0}, {0.5, 0.5}}, 1, {{{1}}, {{1}}}),
                  validation_error);
  CHECK_THROWS_AS(RandomSFT::make(Driver{2, {1, 0}, {0.3, 0.7}}, 1, {{{1}}, {{1}}}),
                  validation_error);
  CHECK_THROWS_AS(RandomSFT::make(Driver{2, {1, 0}, {0.3, 0.3}}, 1, {{{1}}, {{1}}}),
                  validation_error);
  Driver c = Driver::cycle(3);
  c.validate();
  CHECK(c.power(0, -1) == 2);
  CHECK(c.power(1, 5) == 0);
  CHECK(c.power(2, 0) == 2);
  CHECK(c.power(0, -7) == 2);
}

TEST_CASE("core pruning drops letters without bi-infinite extensions") {
  RandomSFT sys = RandomSFT::deterministic(2, {{1, 1}, {0, 0}});
  CHECK(sys.core[0][0] == 1);
  CHECK(sys.core[0][1] == 0);  // letter 1 has no successor
  auto lang = fiber_language(sys, 0, Window::interval(0, 2));
  REQUIRE(lang.size() == 1);
  CHECK(lang[0] == Word{0, 0, 0});

  CHECK_THROWS_AS(RandomSFT::deterministic(2, {{0, 1}, {0, 0}}), validation_error);
  CHECK(golden_mean().core[0][0] == 1);
  CHECK(golden_mean().core[0][1] == 1);
}

TEST_CASE("fiber language worked values") {
  CHECK(fiber_language(full_shift(2), 0, Window::interval(0, 2)).size() == 8);

  auto gm = fiber_language(golden_mean(), 0, Window::interval(0, 2));
  std::vector<Word> want = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}};
  CHECK(gm == want);

  RandomSFT alt = alternating();
  CHECK(fiber_language(alt, 0, Window::interval(0, 3)).size() == 8);
  CHECK(fiber_language(alt, 1, Window::interval(0, 3)).size() == 4);

  // Gapped window: patterns are hull projections.
  auto gap = fiber_language(golden_mean(), 0, Window(1, {{0}, {2}}));
  CHECK(gap.size() == 4);
}

TEST_CASE("word counts match the materialized language") {
  std::mt19937_64 rng(7);
  std::vector<RandomSFT> systems = {full_shift(2), golden_mean(), alternating(),
                                    full_shift(3)};
  for (const auto& sys : systems)
    for (int it = 0; it < 20; ++it) {
      Coord lo = static_cast<Coord>(rng() % 5) - 2;
      Coord hi = lo + static_cast<Coord>(rng() % 6);
      int omega = static_cast<int>(rng() % static_cast<std::uint64_t>(sys.driver.size));
      Window f = Window::interval(lo, hi);
      CHECK(fiber_word_count(sys, omega, f) ==
            doctest::Approx(static_cast<double>(fiber_language(sys, omega, f).size())));
    }
  CHECK_THROWS_AS(fiber_word_count(golden_mean(), 0, Window(1, {{0}, {2}})),
                  validation_error);
}

TEST_CASE("alternating driver word counts follow the parity formula") {
  RandomSFT alt = alternating();
  for (int n = 1; n <= 12; ++n) {
    double c0 = fiber_word_count(alt, 0, Window::interval(0, n - 1));
    double c1 = fiber_word_count(alt, 1, Window::interval(0, n - 1));
    CHECK(c0 == doctest::Approx(std::pow(2.0, 1 + (n - 1 + 1) / 2)));
    CHECK(c1 == doctest::Approx(std::pow(2.0, 1 + (n - 1) / 2)));
  }
}

TEST_CASE("pullback of a partition gives the cylinder join") {
  RandomSFT sys = full_shift(2);
  FiberCover u = FiberCover::letter_partition(sys.driver, 2);
  PullbackCover pb = pullback_cover(sys, u, 0, Window::interval(0, 1));
  REQUIRE(pb.elements.size() == 4);
  for (const auto& e : pb.elements) CHECK(e.size() == 1);
  CHECK(pb.words.size() == 4);
}

TEST_CASE("pullback of letter complements pins single cylinders") {
  RandomSFT sys = full_shift(2);
  FiberCover u = FiberCover::letter_complements(sys.driver, 2);
  PullbackCover pb = pullback_cover(sys, u, 0, Window::interval(0, 1));
  REQUIRE(pb.elements.size() == 4);
  for (const auto& e : pb.elements) CHECK(e.size() == 1);
}

TEST_CASE("pullback respects omega sets") {
  RandomSFT sys = alternating();
  FiberCover u;
  u.elements.push_back({{0}, Window::singleton(Pt{0}), {{0}}, false});
  u.elements.push_back({{0}, Window::singleton(Pt{0}), {{1}}, false});
  u.elements.push_back({{1}, Window::singleton(Pt{0}), {{0}, {1}}, false});
  PullbackCover pb = pullback_cover(sys, u, 0, Window::interval(0, 1));
  REQUIRE(pb.elements.size() == 2);
  CHECK(pb.elements[0].size() == 2);
  CHECK(pb.elements[1].size() == 2);

  // Base points alternate, so from driver point 1 the same cover still works.
  CHECK(pullback_cover(sys, u, 1, Window::interval(0, 1)).elements.size() == 2);

  // Without the whole-alphabet element nothing covers at driver point 1.
  FiberCover miss;
  miss.elements.push_back({{0}, Window::singleton(Pt{0}), {{0}}, false});
  miss.elements.push_back({{0}, Window::singleton(Pt{0}), {{1}}, false});
  CHECK_THROWS_AS(pullback_cover(sys, miss, 1, Window::interval(0, 1)), validation_error);
  try {
    pullback_cover(sys, miss, 1, Window::interval(0, 1));
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("misses fiber words") != std::string::npos);
  }
}

TEST_CASE("min subcover worked values") {
  RandomSFT two = full_shift(2);
  FiberCover comp = FiberCover::letter_complements(two.driver, 2);
  auto r2 = min_subcover(two, comp, 0, Window::interval(0, 1));
  CHECK(r2.count == 4);
  CHECK(r2.partition_fast_path);
  CHECK(min_subcover(two, comp, 0, Window::interval(0, 4)).count == 32);

  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  CHECK(min_subcover(two, part, 0, Window::interval(0, 2)).count == 8);

  RandomSFT gm = golden_mean();
  FiberCover gpart = FiberCover::letter_partition(gm.driver, 2);
  auto rg = min_subcover(gm, gpart, 0, Window::interval(0, 2));
  CHECK(rg.count == 5);
  CHECK(rg.partition_fast_path);

  CHECK(min_subcover(two, part, 0, Window::empty(1)).count == 1);
}

TEST_CASE("min subcover branch and bound on overlapping elements") {
  RandomSFT gm = golden_mean();
  std::vector<int> all = {0};
  Window w01 = Window::interval(0, 1);
  FiberCover u;
  u.elements.push_back({all, w01, {{0, 0}}, false});
  u.elements.push_back({all, w01, {{0, 1}}, false});
  u.elements.push_back({all, w01, {{1, 0}}, false});
  u.elements.push_back({all, w01, {{0, 0}, {0, 1}}, false});
  auto r = min_subcover(gm, u, 0, Window::singleton(Pt{0}));
  CHECK(r.count == 2);
  CHECK_FALSE(r.partition_fast_path);
  CHECK(r.witness == std::vector<int>{1, 3});

  // A whole-fiber element makes the cover trivial.
  FiberCover triv;
  triv.elements.push_back({all, Window::singleton(Pt{0}), {{0}}, false});
  triv.elements.push_back({all, Window::singleton(Pt{0}), {{0}, {1}}, false});
  triv.elements.push_back({all, Window::singleton(Pt{0}), {{1}}, false});
  CHECK(min_subcover(gm, triv, 0, Window::interval(0, 1)).count == 1);
}

TEST_CASE("min subcover enforces its element bound") {
  RandomSFT two = full_shift(2);
  FiberCover u;
  std::vector<int> all = {0};
  u.elements.push_back({all, Window::singleton(Pt{0}), {{0}}, false});
  u.elements.push_back({all, Window::singleton(Pt{0}), {{1}}, false});
  u.elements.push_back({all, Window::interval(0, 1), {{0, 0}, {1, 1}}, false});
  CHECK_THROWS_AS(min_subcover(two, u, 0, Window::interval(0, 5)), bound_error);
  try {
    min_subcover(two, u, 0, Window::interval(0, 5));
  } catch (const bound_error& e) {
    CHECK(std::string(e.what()).find("smaller window") != std::string::npos);
  }
  CHECK(min_subcover(two, u, 0, Window::interval(0, 1)).count == 4);
}

TEST_CASE("fiber entropy of the full 2-shift is log 2 at every window") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  auto rep = fiber_topological_entropy(two, part, FolnerSequence::boxes(1), 12);
  REQUIRE(rep.rows.size() == 12);
  for (const auto& r : rep.rows) {
    CHECK(r.normalized == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(r.increment == doctest::Approx(kLog2).epsilon(1e-12));
  }
  CHECK(rep.estimate == doctest::Approx(kLog2).epsilon(1e-12));
  REQUIRE(rep.inf_normalized.has_value());
  CHECK(*rep.inf_normalized == doctest::Approx(kLog2).epsilon(1e-12));
}

TEST_CASE("golden-mean entropy estimate converges to the golden ratio rate") {
  RandomSFT gm = golden_mean();
  FiberCover part = FiberCover::letter_partition(gm.driver, 2);
  auto rep = fiber_topological_entropy(gm, part, FolnerSequence::boxes(1), 20);
  std::vector<double> fib = {1, 1};
  for (int i = 2; i < 24; ++i) fib.push_back(fib[i - 1] + fib[i - 2]);
  for (const auto& r : rep.rows)
    CHECK(std::exp(r.total) == doctest::Approx(fib[static_cast<std::size_t>(r.n) + 1]));
  double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(rep.estimate - std::log(phi)) < 5e-3);
  CHECK(std::abs(rep.estimate - std::log(phi)) < 1e-8);
}

TEST_CASE("alternating driver entropy averages the two fibers") {
  RandomSFT alt = alternating();
  FiberCover part = FiberCover::letter_partition(alt.driver, 2);
  auto rep = fiber_topological_entropy(alt, part, FolnerSequence::boxes(1), 20);
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].increment == doctest::Approx(0.5 * kLog2).epsilon(1e-12));
  CHECK(std::abs(rep.estimate - 0.5 * kLog2) < 2e-2);
}

TEST_CASE("complement covers with empty base overlap have zero entropy") {
  RandomSFT alt = alternating();
  FiberCover u;
  u.elements.push_back({{0}, Window::singleton(Pt{0}), {{0}}, true});
  u.elements.push_back({{1}, Window::singleton(Pt{0}), {{0}}, true});
  auto rep = fiber_topological_entropy(alt, u, FolnerSequence::boxes(1), 6);
  for (const auto& r : rep.rows) CHECK(r.total == 0.0);
  CHECK(rep.estimate == 0.0);
}

TEST_CASE("zero potential pressure is the subcover count") {
  RandomSFT gm = golden_mean();
  FiberCover part = FiberCover::letter_partition(gm.driver, 2);
  CHECK(fiber_pressure(gm, PotentialFamily::zero(), part, 0, Window::interval(0, 2)) ==
        doctest::Approx(5.0).epsilon(1e-12));
  RandomSFT two = full_shift(2);
  FiberCover tp = FiberCover::letter_partition(two.driver, 2);
  CHECK(log_fiber_pressure(two, PotentialFamily::zero(), tp, 0, Window::interval(0, 3)) ==
        doctest::Approx(4 * kLog2).epsilon(1e-12));
}

TEST_CASE("single-site pressure of the weighted 2-shift is 1+e") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  PotentialFamily d = PotentialFamily::additive({{0.0, 1.0}});
  CHECK(fiber_pressure(two, d, part, 0, Window::singleton(Pt{0})) ==
        doctest::Approx(1.0 + std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("pressure equals the brute-force minimum over refining partitions") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> pot(-1.0, 1.0);
  std::vector<RandomSFT> systems = {full_shift(2), golden_mean()};
  for (int it = 0; it < 30; ++it) {
    const RandomSFT& sys = systems[it % 2];
    Window f = (it % 3 == 0) ? Window::interval(0, 2) : Window::interval(0, 1);
    FiberCover u;
    std::vector<int> all = {0};
    if (it % 2 == 1 && it % 3 != 0) {
      u.elements.push_back({all, Window::singleton(Pt{0}), {{0}}, false});
      u.elements.push_back({all, Window::singleton(Pt{0}), {{1}}, false});
      u.elements.push_back({all, Window::interval(0, 1), {{0, 0}, {1, 0}}, false});
    } else {
      u = FiberCover::letter_partition(sys.driver, 2);
    }
    PotentialFamily d = PotentialFamily::additive({{pot(rng), pot(rng)}});
    PullbackCover pb = pullback_cover(sys, u, 0, f);
    int nw = static_cast<int>(pb.words.size());
    REQUIRE(nw <= 8);
    std::vector<double> dv;
    for (const Word& w : pb.words) {
      Word sub;
      for (Coord c = f.min1(); c <= f.max1(); ++c)
        sub.push_back(w[static_cast<std::size_t>(c - pb.hull.min1())]);
      dv.push_back(d.value(sys.driver, 0, sub, f));
    }
    double brute = -1;
    for (const auto& blocks : all_word_partitions(nw)) {
      if (!blocks_refine_elements(blocks, pb.elements)) continue;
      double sum = 0;
      for (const auto& b : blocks) {
        double mx = dv[static_cast<std::size_t>(b[0])];
        for (int i : b) mx = std::max(mx, dv[static_cast<std::size_t>(i)]);
        sum += std::exp(mx);
      }
      if (brute < 0 || sum < brute) brute = sum;
    }
    CHECK(fiber_pressure(sys, d, u, 0, f) == doctest::Approx(brute).epsilon(1e-10));
  }
}

TEST_CASE("pressure sits in its subcover sandwich") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> pot(-1.0, 1.0);
  for (int it = 0; it < 40; ++it) {
    RandomSFT sys = (it % 2) ? golden_mean() : alternating();
    FiberCover u = (it % 3) ? FiberCover::letter_partition(sys.driver, 2)
                            : FiberCover::letter_complements(sys.driver, 2);
    Window f = Window::interval(0, 1 + static_cast<Coord>(rng() % 3));
    int omega = static_cast<int>(rng() % static_cast<std::uint64_t>(sys.driver.size));
    PotentialFamily d =
        PotentialFamily::additive(std::vector<std::vector<double>>(
            static_cast<std::size_t>(sys.driver.size), {pot(rng), pot(rng)}));
    double lp = log_fiber_pressure(sys, d, u, omega, f);
    double n = static_cast<double>(min_subcover(sys, u, omega, f).count);
    std::vector<Word> lang = fiber_language(sys, omega, f);
    double mx = d.value(sys.driver, omega, lang[0], f);
    for (const Word& w : lang) mx = std::max(mx, d.value(sys.driver, omega, w, f));
    CHECK(lp >= mx - 1e-9);
    CHECK(lp <= std::log(n) + mx + 1e-9);
  }
}

TEST_CASE("word distributions never beat the log pressure") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> pot(-1.0, 1.0), mass(0.05, 1.0);
  for (int it = 0; it < 30; ++it) {
    RandomSFT sys = (it % 2) ? golden_mean() : full_shift(2);
    FiberCover u = FiberCover::letter_partition(sys.driver, 2);
    Window f = Window::interval(0, 1);
    PotentialFamily d = PotentialFamily::additive({{pot(rng), pot(rng)}});
    PullbackCover pb = pullback_cover(sys, u, 0, f);
    int nw = static_cast<int>(pb.words.size());
    FiniteSpace nu;
    double sum = 0;
    for (int i = 0; i < nw; ++i) {
      nu.labels.push_back(word_str(pb.words[static_cast<std::size_t>(i)]));
      nu.weights.push_back(mass(rng));
      sum += nu.weights.back();
    }
    for (double& w : nu.weights) w /= sum;
    double h = cover_entropy(nu, make_cover(nw, pb.elements), Partition::trivial(nw));
    double mean = 0;
    for (int i = 0; i < nw; ++i)
      mean += nu.weights[static_cast<std::size_t>(i)] *
              d.value(sys.driver, 0, pb.words[static_cast<std::size_t>(i)], f);
    CHECK(h + mean <= log_fiber_pressure(sys, d, u, 0, f) + 1e-9);
  }
}

TEST_CASE("log pressure is a certified sub-additive window function") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  PotentialFamily d = PotentialFamily::additive({{0.0, 0.5}});
  SetFunction f = make_log_pressure_function(two, d, part);
  PropertyReport rep = check_properties(f, 5, 200, 11);
  CHECK(rep.all_declared_pass());
  CHECK(f.certified().subadditive);
  CHECK(f.certified().invariant);
  CHECK(f.certified().monotone);

  auto lim = limit_along(f, FolnerSequence::boxes(1), 10);
  CHECK(lim.estimate == doctest::Approx(std::log(1.0 + std::exp(0.5))).epsilon(1e-9));
}

TEST_CASE("pressure estimate of the weighted 2-shift is exact at every window") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  PotentialFamily d = PotentialFamily::additive({{0.0, 1.0}});
  auto rep = pressure_estimate(two, d, part, FolnerSequence::boxes(1), 12);
  double want = std::log(1.0 + std::exp(1.0));
  for (const auto& r : rep.rows) {
    CHECK(r.normalized == doctest::Approx(want).epsilon(1e-9));
    CHECK(r.sup_normalized == doctest::Approx(1.0).epsilon(1e-12));
    // sup_P(D) <= pressure <= entropy + sup_P(D), all at the same window
    CHECK(r.sup_normalized <= r.normalized + 1e-9);
    CHECK(r.normalized <= kLog2 + r.sup_normalized + 1e-9);
  }
  CHECK(std::abs(rep.estimate - want) < 1e-3);
  REQUIRE(rep.sup_estimate.has_value());
  CHECK(*rep.sup_estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero potential estimate coincides with fiber entropy") {
  RandomSFT gm = golden_mean();
  FiberCover part = FiberCover::letter_partition(gm.driver, 2);
  auto ent = fiber_topological_entropy(gm, part, FolnerSequence::boxes(1), 8);
  auto prs = pressure_estimate(gm, PotentialFamily::zero(), part, FolnerSequence::boxes(1), 8);
  REQUIRE(ent.rows.size() == prs.rows.size());
  for (std::size_t i = 0; i < ent.rows.size(); ++i)
    CHECK(prs.rows[i].total == doctest::Approx(ent.rows[i].total).epsilon(1e-12));
}

TEST_CASE("sqrt correction vanishes in the normalization") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  PotentialFamily d = PotentialFamily::additive_plus_sqrt({{0.0, 0.0}});
  auto rep = pressure_estimate(two, d, part, FolnerSequence::boxes(1), 12);
  for (const auto& r : rep.rows) {
    double n = static_cast<double>(r.window_size);
    CHECK(r.total == doctest::Approx(n * kLog2 + std::sqrt(n)).epsilon(1e-9));
    CHECK(r.normalized - kLog2 == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-9));
  }
}

TEST_CASE("custom potentials must certify their declared flags") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  PropertyFlags all{true, true, true, true, true};
  PotentialFamily d = PotentialFamily::custom(
      [](int, const Word& w, const Window& f) {
        double s = 0;
        for (const Pt& p : f.points())
          s += (w[static_cast<std::size_t>(p[0] - f.min1())] == 1) ? 1.0 : 0.0;
        return s;
      },
      all);
  CHECK_THROWS_AS(pressure_estimate(two, d, part, FolnerSequence::boxes(1), 3),
                  validation_error);
  PotentialCheck ck = certify_potential(two, d, 5, 300);
  CHECK(ck.passed);
  CHECK(d.certified);
  auto custom_rep = pressure_estimate(two, d, part, FolnerSequence::boxes(1), 4);
  auto add_rep = pressure_estimate(two, PotentialFamily::additive({{0.0, 1.0}}), part,
                                   FolnerSequence::boxes(1), 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(custom_rep.rows[i].total == doctest::Approx(add_rep.rows[i].total).epsilon(1e-12));

  PotentialFamily bad = PotentialFamily::custom(
      [](int, const Word&, const Window& f) { return -static_cast<double>(f.size()); },
      PropertyFlags{false, true, true, true, false});
  PotentialCheck bk = certify_potential(two, bad, 5, 300);
  CHECK_FALSE(bk.passed);
  CHECK_FALSE(bad.certified);
  CHECK(bk.detail.find("nonnegative") != std::string::npos);

  PotentialFamily super = PotentialFamily::custom(
      [](int, const Word&, const Window& f) {
        return static_cast<double>(f.size()) * static_cast<double>(f.size());
      },
      PropertyFlags{true, true, true, true, false});
  CHECK_FALSE(certify_potential(two, super, 5, 300).passed);
}

TEST_CASE("truncation with the full stage changes nothing") {
  RandomSFT alt = alternating();
  FiberCover part = FiberCover::letter_partition(alt.driver, 2);
  auto ck = truncation_check(alt, PotentialFamily::zero(), part, {0, 1}, 0,
                             Window::interval(0, 1));
  CHECK(ck.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ck.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ck.holds);
}

TEST_CASE("two-block truncation meets its ratio bound") {
  RandomSFT alt = alternating();
  FiberCover part = FiberCover::letter_partition(alt.driver, 2);
  // From 0 the free transition sits at the dropped base point: equality.
  auto c0 = truncation_check(alt, PotentialFamily::zero(), part, {0}, 0,
                             Window::interval(0, 1));
  CHECK(c0.holds);
  CHECK(c0.ratio == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c0.bound == doctest::Approx(2.0).epsilon(1e-9));
  // From 1 the identity transition makes the dropped label free: strict.
  auto c1 = truncation_check(alt, PotentialFamily::zero(), part, {0}, 1,
                             Window::interval(0, 1));
  CHECK(c1.holds);
  CHECK(c1.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c1.bound == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("truncated pressures increase to the full cover pressure") {
  RandomSFT alt = alternating();
  FiberCover part = FiberCover::letter_partition(alt.driver, 2);
  std::vector<std::vector<int>> stages = {{0}, {0, 1}};
  CHECK_THROWS_AS(truncate_cover(alt, part, {{1}, {0}}, 2), validation_error);
  Window f = Window::interval(0, 2);
  double full = log_fiber_pressure(alt, PotentialFamily::zero(), part, 0, f);
  double prev = -1;
  for (int n = 1; n <= 2; ++n) {
    FiberCover un = truncate_cover(alt, part, stages, n);
    double lp = log_fiber_pressure(alt, PotentialFamily::zero(), un, 0, f);
    CHECK(lp >= prev - 1e-12);
    CHECK(lp <= full + 1e-12);
    prev = lp;
  }
  CHECK(prev == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("fiber entropy window function certifies and agrees with the limit") {
  RandomSFT two = full_shift(2);
  FiberCover part = FiberCover::letter_partition(two.driver, 2);
  SetFunction f = make_fiber_entropy_function(two, part);
  PropertyReport rep = check_properties(f, 6, 200, 13);
  CHECK(rep.all_declared_pass());
  auto lim = limit_along(f, FolnerSequence::boxes(1), 10);
  CHECK(lim.estimate == doctest::Approx(kLog2).epsilon(1e-12));
  auto iw = inf_over_windows(f, 6, 3);
  CHECK(iw.value == doctest::Approx(kLog2).epsilon(1e-12));
}
