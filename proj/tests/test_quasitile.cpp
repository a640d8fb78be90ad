#include "amentropy/quasitile.hpp"

#include <map>
#include <random>

#include "doctest.h"

using namespace amentropy;

namespace {

Window w1(std::vector<Coord> xs) {
  std::vector<Pt> pts;
  for (Coord x : xs) pts.push_back({x});
  return Window(1, std::move(pts));
}

// Exact rational field value of sum a_j 1_{E_j} + (1/|T|) sum_{g in E} 1_{T+g}.
Rat reconstructed_value(const IndicatorDecomposition& d, const Window& t, const Pt& x) {
  long long m = 0;
  for (const Pt& g : d.core.points())
    if (translate(t, g).contains(x)) ++m;
  Rat v(m, d.t_size);
  for (const auto& term : d.terms)
    if (term.set.contains(x)) v = v + term.coeff;
  return v;
}

}  // namespace

TEST_CASE("eps disjoint worked values") {
  std::vector<Window> pair = {w1({0, 1}), w1({1, 2})};
  CHECK(is_eps_disjoint(pair, 0.6));
  CHECK_FALSE(is_eps_disjoint(pair, 0.4));
  std::vector<Window> apart = {w1({0, 1}), w1({5, 6}), w1({9})};
  for (double eps : {0.05, 0.3, 0.9}) CHECK(is_eps_disjoint(apart, eps));
  CHECK_THROWS_AS(is_eps_disjoint(pair, 0.0), validation_error);
  CHECK_THROWS_AS(is_eps_disjoint(pair, 1.0), validation_error);
  CHECK_THROWS_AS(is_eps_disjoint({Window::empty(1)}, 0.5), validation_error);
}

TEST_CASE("eps disjoint needs a system of distinct representatives") {
  // Three overlapping pairs on four points: demands 1 each at eps=0.6.
  std::vector<Window> sets = {w1({0, 1}), w1({1, 2}), w1({2, 3})};
  CHECK(is_eps_disjoint(sets, 0.6));
  // At eps=0.4 each demands both its points; 6 > 4 ground elements.
  CHECK_FALSE(is_eps_disjoint(sets, 0.4));
}

TEST_CASE("alpha covers worked values") {
  Window a = w1({0, 1, 2, 3});
  CHECK(alpha_covers({w1({0, 1})}, a, 0.5));
  CHECK_FALSE(alpha_covers({w1({0})}, a, 0.5));
  CHECK(alpha_covers({w1({0, 1}), w1({2, 3, 99})}, a, 1.0));
  // Only the part inside A counts.
  CHECK_FALSE(alpha_covers({w1({7, 8, 9, 10})}, a, 0.25));
  CHECK_THROWS_AS(alpha_covers({a}, Window::empty(1), 0.5), validation_error);
  CHECK_THROWS_AS(alpha_covers({a}, a, 0.0), validation_error);
}

TEST_CASE("quasi tile exact interval tiling") {
  auto qt = quasi_tile({w1({0, 1})}, Window::interval(0, 9), 0.2);
  CHECK(qt.centers.size() == 1);
  CHECK(qt.centers[0] == std::vector<Pt>{{0}, {2}, {4}, {6}, {8}});
  CHECK(qt.cover_fraction == 1.0);
  CHECK_NOTHROW(qt.verify());
}

TEST_CASE("quasi tile two tiles") {
  auto qt = quasi_tile({w1({0}), w1({0, 1})}, Window::interval(0, 9), 0.2);
  CHECK(qt.tiles[0].size() == 1);
  CHECK(qt.tiles[1].size() == 2);
  CHECK(qt.cover_fraction >= 0.8);
  CHECK_NOTHROW(qt.verify());
  // The larger tile is placed first and already covers everything.
  CHECK(qt.centers[1].size() == 5);
  CHECK(qt.centers[0].empty());
}

TEST_CASE("quasi tile insufficient invariance") {
  CHECK_THROWS_AS(quasi_tile({Window::interval(0, 7)}, w1({0, 1}), 0.2),
                  insufficient_invariance_error);
  try {
    quasi_tile({Window::interval(0, 7)}, w1({0, 1}), 0.2);
    FAIL("expected insufficient_invariance_error");
  } catch (const insufficient_invariance_error& e) {
    CHECK(std::string(e.what()).find("insufficient invariance") != std::string::npos);
    CHECK(e.achieved_fraction == 0.0);
  }
  CHECK_THROWS_AS(quasi_tile({w1({0, 1})}, Window::interval(0, 9), 0.3), validation_error);
}

TEST_CASE("quasi tile on a 2-d box") {
  auto qt = quasi_tile({Window::box(2, 2)}, Window::box(2, 10), 0.2);
  CHECK(qt.centers[0].size() == 25);
  CHECK(qt.cover_fraction == 1.0);
}

TEST_CASE("quasi tile seeded instances satisfy all invariants") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 20; ++it) {
    Coord len = 40 + static_cast<Coord>(rng() % 21);
    auto qt = quasi_tile({w1({0, 1}), Window::interval(0, 3)}, Window::interval(0, len - 1), 0.2);
    CHECK(qt.cover_fraction >= 0.8);
    CHECK_NOTHROW(qt.verify());
  }
}

TEST_CASE("sum indicator worked values") {
  auto [lhs, rhs] = sum_indicator_identity(w1({0, 1}), w1({0, 2}));
  std::map<Pt, long long> want{{{0}, 1}, {{1}, 1}, {{2}, 1}, {{3}, 1}};
  CHECK(lhs == want);
  CHECK(rhs == want);

  auto [l2, r2] = sum_indicator_identity(w1({0}), w1({3, 5, 9}));
  std::map<Pt, long long> ind{{{3}, 1}, {{5}, 1}, {{9}, 1}};
  CHECK(l2 == ind);
  CHECK(r2 == ind);

  auto [l3, r3] = sum_indicator_identity(w1({0, 1}), w1({0, 1}));
  std::map<Pt, long long> tri{{{0}, 1}, {{1}, 2}, {{2}, 1}};
  CHECK(l3 == tri);
  CHECK(r3 == tri);
}

TEST_CASE("sum indicator identity holds on random windows") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 100; ++it) {
    std::vector<Coord> ts, es;
    std::size_t nt = 1 + rng() % 12, ne = 1 + rng() % 12;
    for (std::size_t i = 0; i < nt; ++i) ts.push_back(static_cast<Coord>(rng() % 25) - 12);
    for (std::size_t i = 0; i < ne; ++i) es.push_back(static_cast<Coord>(rng() % 25) - 12);
    auto [lhs, rhs] = sum_indicator_identity(w1(ts), w1(es));
    CHECK(lhs == rhs);
  }
  // Same in d=2.
  auto [l, r] = sum_indicator_identity(Window::box(2, 3), Window(2, {{0, 0}, {2, 1}, {1, 4}}));
  CHECK(l == r);
}

TEST_CASE("invariant core worked values") {
  CHECK(invariant_core(Window::interval(0, 5), w1({0, 1})) == Window::interval(0, 4));
  Window f = w1({0, 3, 4, 7});
  CHECK(invariant_core(f, w1({0})) == f);
  for (Coord n : {6, 9, 14})
    for (Coord k : {1, 2, 3})
      CHECK(invariant_core(Window::interval(0, n - 1), Window::interval(0, k - 1)) ==
            Window::interval(0, n - k));
}

TEST_CASE("invariant core density along boxes") {
  Window t = w1({0, 1, 2});
  for (Coord n : {8, 32, 128}) {
    Window f = Window::interval(0, n - 1);
    double density = static_cast<double>(invariant_core(f, t).size()) / f.size();
    CHECK(density == doctest::Approx(1.0 - 2.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("indicator decomposition worked values") {
  auto d = indicator_decomposition(Window::interval(0, 5), w1({0, 1}));
  CHECK(d.core == Window::interval(0, 4));
  REQUIRE(d.terms.size() == 2);
  CHECK(d.terms[0].coeff == Rat(1, 2));
  CHECK(d.terms[0].set == w1({0}));
  CHECK(d.terms[1].coeff == Rat(1, 2));
  CHECK(d.terms[1].set == w1({5}));

  auto d0 = indicator_decomposition(w1({2, 5, 9}), w1({0}));
  CHECK(d0.core == w1({2, 5, 9}));
  CHECK(d0.terms.empty());

  auto d4 = indicator_decomposition(Window::interval(0, 3), w1({0, 1}));
  CHECK(d4.core == Window::interval(0, 2));
  REQUIRE(d4.terms.size() == 2);
  CHECK(d4.terms[0].coeff == Rat(1, 2));
  CHECK(d4.terms[0].set == w1({0}));
  CHECK(d4.terms[1].set == w1({3}));
}

TEST_CASE("indicator decomposition is exact in rationals") {
  std::mt19937_64 rng(47);
  int done = 0;
  while (done < 100) {
    std::vector<Coord> ts, fs;
    std::size_t nt = 1 + rng() % 4;
    std::size_t nf = 8 + rng() % 25;
    for (std::size_t i = 0; i < nt; ++i) ts.push_back(static_cast<Coord>(rng() % 4));
    for (std::size_t i = 0; i < nf; ++i) fs.push_back(static_cast<Coord>(rng() % 40));
    Window t = w1(ts), f = w1(fs);
    if (invariant_core(f, t).is_empty()) continue;
    ++done;
    auto d = indicator_decomposition(f, t);
    for (const auto& term : d.terms) {
      CHECK(Rat(0, 1) < term.coeff);
      CHECK(window_subset(term.set, f));
    }
    // Pointwise identity over a hull containing every participating set.
    for (Coord x = -2; x <= 45; ++x) {
      Rat got = reconstructed_value(d, t, {x});
      Rat want(f.contains({x}) ? 1 : 0, 1);
      CHECK(got == want);
    }
  }
}

TEST_CASE("indicator decomposition in d=2") {
  Window f = Window::box(2, 4);
  Window t = Window(2, {{0, 0}, {1, 0}, {0, 1}});
  auto d = indicator_decomposition(f, t);
  CHECK(!d.core.is_empty());
  for (Coord x = -1; x <= 4; ++x)
    for (Coord y = -1; y <= 4; ++y) {
      Rat got = reconstructed_value(d, t, {x, y});
      CHECK(got == Rat(f.contains({x, y}) ? 1 : 0, 1));
    }
}

TEST_CASE("decomposition bound is equality for cardinality") {
  // f(E)=|E| is modular, so the layer-cake split preserves totals exactly.
  auto d = indicator_decomposition(Window::interval(0, 11), w1({0, 1, 2}));
  Rat rhs(0, 1);
  for (const Pt& g : d.core.points()) {
    (void)g;
    rhs = rhs + Rat(3, d.t_size);
  }
  for (const auto& term : d.terms) rhs = rhs + term.coeff * Rat(term.set.size(), 1);
  CHECK(rhs == Rat(12, 1));
}
