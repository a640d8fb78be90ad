#include "amentropy/tuples.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

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

// Two fixed points: the identity matrix only allows the constant words.
RandomSFT periodic_pair() { return RandomSFT::deterministic(2, {{1, 0}, {0, 1}}); }

RelativeMarkovMeasure atomic_pair_measure() {
  RelativeMarkovMeasure mu;
  mu.pi = {{0.5, 0.5}};
  mu.q = {{{1, 0}, {0, 1}}};
  return mu;
}

// Letters {0,1} form a free block, letters {2,3} a period-two swap block.
RandomSFT two_block() {
  return RandomSFT::deterministic(
      4, {{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
}

std::vector<std::vector<double>> two_block_kernel() {
  return {{0.5, 0.5, 0, 0}, {0.5, 0.5, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
}

RelativeMarkovMeasure block_a_measure() {
  RelativeMarkovMeasure mu;
  mu.pi = {{0.5, 0.5, 0, 0}};
  mu.q = {two_block_kernel()};
  return mu;
}

RelativeMarkovMeasure block_b_measure() {
  RelativeMarkovMeasure mu;
  mu.pi = {{0, 0, 0.5, 0.5}};
  mu.q = {two_block_kernel()};
  return mu;
}

RelativeMarkovMeasure block_mix_measure() {
  RelativeMarkovMeasure mu;
  mu.pi = {{0.25, 0.25, 0.25, 0.25}};
  mu.q = {two_block_kernel()};
  return mu;
}

TupleQuery pair_query(Word a, Word b, int resolution, double tau = 0.1) {
  TupleQuery q;
  q.prefixes = {std::move(a), std::move(b)};
  q.resolution = resolution;
  q.tau = tau;
  return q;
}

std::vector<Word> all_words(int alphabet, int n) {
  std::vector<Word> out;
  Word w(static_cast<std::size_t>(n), 0);
  for (;;) {
    out.push_back(w);
    int i = n - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == alphabet - 1) {
      w[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++w[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

TEST_CASE("tuple query validation") {
  RandomSFT sys = full_shift(2);

  SUBCASE("arity below two") {
    TupleQuery q;
    q.prefixes = {{0}};
    CHECK_THROWS_WITH_AS(q.validate(sys), "tuple arity must be at least two",
                         validation_error);
  }
  SUBCASE("resolution must be positive") {
    TupleQuery q = pair_query({0}, {1}, 0);
    CHECK_THROWS_WITH_AS(q.validate(sys), "resolution must be positive",
                         validation_error);
  }
  SUBCASE("threshold must be positive") {
    TupleQuery q = pair_query({0}, {1}, 4, 0.0);
    CHECK_THROWS_WITH_AS(q.validate(sys), "acceptance threshold must be positive",
                         validation_error);
  }
  SUBCASE("empty prefix") {
    TupleQuery q = pair_query({}, {1}, 4);
    CHECK_THROWS_WITH_AS(q.validate(sys), "tuple cylinder prefix is empty",
                         validation_error);
  }
  SUBCASE("prefix longer than the window") {
    TupleQuery q = pair_query({0, 1}, {1}, 1);
    CHECK_THROWS_WITH_AS(q.validate(sys),
                         "cylinder prefix longer than the resolution window",
                         validation_error);
  }
  SUBCASE("letter outside the alphabet") {
    TupleQuery q = pair_query({2}, {1}, 4);
    CHECK_THROWS_WITH_AS(q.validate(sys), "cylinder letter outside the alphabet",
                         validation_error);
  }
  SUBCASE("one prefix extends the other: cylinders nest instead of separating") {
    TupleQuery q = pair_query({0}, {0, 1}, 4);
    CHECK_THROWS_WITH_AS(
        q.validate(sys),
        "tuple cylinders are not pairwise disjoint at the stated resolution",
        validation_error);
    TupleQuery r = pair_query({1}, {1}, 4);
    CHECK_THROWS_AS(r.validate(sys), validation_error);
  }
  SUBCASE("disjoint pairs pass, including unequal lengths") {
    CHECK_NOTHROW(pair_query({0}, {1}, 4).validate(sys));
    CHECK_NOTHROW(pair_query({0}, {1, 0}, 4).validate(sys));
    TupleQuery t;
    t.prefixes = {{0, 0}, {0, 1}, {1}};
    t.resolution = 4;
    CHECK_NOTHROW(t.validate(sys));
  }
}

TEST_CASE("complement cover mirrors the query cylinders") {
  RandomSFT sys = golden_mean();
  TupleQuery q = pair_query({0}, {1, 0}, 6);
  FiberCover u = complement_cover(sys, q);
  REQUIRE(u.elements.size() == 2);
  for (const FiberCoverElement& e : u.elements) {
    CHECK(e.complement);
    CHECK(e.omega_set == std::vector<int>{0});
    CHECK(e.words.size() == 1);
  }
  CHECK(u.elements[0].window.size() == 1);
  CHECK(u.elements[1].window.size() == 2);
  CHECK(u.elements[1].words[0] == Word{1, 0});
}

TEST_CASE("full shift letter pair is an entropy pair with value log 2") {
  RandomSFT sys = full_shift(2);
  TupleQuery q = pair_query({0}, {1}, 8);

  TupleDecision top = topological_tuple_test(sys, q);
  CHECK(top.accept);
  CHECK(top.value == doctest::Approx(kLog2).epsilon(1e-12));
  CHECK(!top.caveat.empty());

  RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
  TupleDecision mes = measure_tuple_test(sys, mu, q);
  CHECK(mes.accept);
  CHECK(mes.value == doctest::Approx(kLog2).epsilon(1e-12));
  CHECK(!mes.caveat.empty());
}

TEST_CASE("periodic fiber rejects every pair with value exactly zero") {
  RandomSFT sys = periodic_pair();
  RelativeMarkovMeasure mu = atomic_pair_measure();
  TupleQuery q = pair_query({0}, {1}, 8);

  TupleDecision top = topological_tuple_test(sys, q);
  CHECK(!top.accept);
  CHECK(top.value == 0.0);

  TupleDecision mes = measure_tuple_test(sys, mu, q);
  CHECK(!mes.accept);
  CHECK(mes.value == 0.0);

  TupleQuery q2 = pair_query({0, 0}, {1, 1}, 8);
  CHECK(!topological_tuple_test(sys, q2).accept);
  CHECK(!measure_tuple_test(sys, mu, q2).accept);
}

TEST_CASE("golden mean: the pair [0], [10] is detected at modest resolution") {
  RandomSFT sys = golden_mean();
  RelativeMarkovMeasure mu = parry_measure(sys);
  TupleQuery q = pair_query({0}, {1, 0}, 6);

  TupleDecision top = topological_tuple_test(sys, q);
  TupleDecision mes = measure_tuple_test(sys, mu, q);
  CHECK(top.accept);
  CHECK(mes.accept);
  CHECK(top.value > 0.1);
  CHECK(mes.value > 0.1);
}

TEST_CASE("measure acceptance implies topological acceptance on shipped scenarios") {
  // The dominated decision never fires alone; checked at equal resolution
  // and threshold.
  auto contained = [](const TupleDecision& mes, const TupleDecision& top) {
    return !mes.accept || top.accept;
  };

  RandomSFT two = full_shift(2);
  RelativeMarkovMeasure bern = bernoulli_measure(two, {0.5, 0.5});
  TupleQuery qa = pair_query({0}, {1}, 6);
  CHECK(contained(measure_tuple_test(two, bern, qa), topological_tuple_test(two, qa)));

  RandomSFT gm = golden_mean();
  RelativeMarkovMeasure parry = parry_measure(gm);
  TupleQuery qb = pair_query({0}, {1, 0}, 6);
  CHECK(contained(measure_tuple_test(gm, parry, qb), topological_tuple_test(gm, qb)));

  RandomSFT per = periodic_pair();
  RelativeMarkovMeasure atom = atomic_pair_measure();
  TupleQuery qc = pair_query({0}, {1}, 6);
  CHECK(contained(measure_tuple_test(per, atom, qc), topological_tuple_test(per, qc)));

  RandomSFT blk = two_block();
  RelativeMarkovMeasure mix = block_mix_measure();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      TupleQuery q = pair_query({a}, {b}, 3);
      CHECK(contained(measure_tuple_test(blk, mix, q),
                      topological_tuple_test(blk, q)));
    }
}

TEST_CASE("refining the resolution never drops a comfortably accepted tuple") {
  RandomSFT two = full_shift(2);
  TupleQuery qa = pair_query({0}, {1}, 4);
  TupleDecision base = topological_tuple_test(two, qa);
  REQUIRE(base.value >= 3 * qa.tau);
  TupleQuery qa5 = pair_query({0}, {1}, 5);
  CHECK(topological_tuple_test(two, qa5).accept);

  RandomSFT gm = golden_mean();
  RelativeMarkovMeasure parry = parry_measure(gm);
  TupleQuery qb = pair_query({0}, {1, 0}, 5);
  TupleDecision mb = measure_tuple_test(gm, parry, qb);
  REQUIRE(mb.value >= 3 * qb.tau);
  TupleQuery qb6 = pair_query({0}, {1, 0}, 6);
  CHECK(measure_tuple_test(gm, parry, qb6).accept);
}

TEST_CASE("tuple product law: independent coordinates over a trivial factor") {
  RandomSFT sys = full_shift(2);
  RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
  PinskerScenario sc = PinskerScenario::trivial("independent coordinates");

  std::vector<LambdaRow> rows = lambda_n(sys, mu, sc, 2, 1);
  REQUIRE(rows.size() == 4);
  for (const LambdaRow& r : rows) CHECK(r.mass == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<LambdaRow> triples = lambda_n(sys, mu, sc, 3, 1);
  REQUIRE(triples.size() == 8);
  for (const LambdaRow& r : triples)
    CHECK(r.mass == doctest::Approx(0.125).epsilon(1e-12));

  std::vector<std::vector<Word>> pairs = tuple_set_from_support(sys, mu, sc, 2, 1);
  std::vector<std::vector<Word>> expect = {{{0}, {1}}, {{1}, {0}}};
  CHECK(pairs == expect);
  CHECK(tuple_set_from_support(sys, mu, sc, 3, 1).size() == 6);
}

TEST_CASE("tuple product law: diagonal over a full factor") {
  RandomSFT sys = periodic_pair();
  RelativeMarkovMeasure mu = atomic_pair_measure();
  PinskerScenario sc = PinskerScenario::full("deterministic fiber");

  std::vector<LambdaRow> rows = lambda_n(sys, mu, sc, 2, 2);
  REQUIRE(rows.size() == 2);
  for (const LambdaRow& r : rows) {
    CHECK(r.words[0] == r.words[1]);
    CHECK(r.mass == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(tuple_set_from_support(sys, mu, sc, 2, 2).empty());
}

TEST_CASE("undeclared pinsker structure is refused") {
  RandomSFT sys = full_shift(2);
  RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
  PinskerScenario sc;
  CHECK_THROWS_WITH_AS(
      lambda_n(sys, mu, sc, 2, 1),
      "pinsker mode not declared for this scenario; refusing to guess the tuple law",
      validation_error);
  TupleQuery q = pair_query({0}, {1}, 1);
  CHECK_THROWS_AS(positivity_equivalence_probe(sys, mu, q, sc, 4), validation_error);
}

TEST_CASE("support tuples coincide with measure-test acceptance at equal resolution") {
  // Candidates are restricted to pairwise-disjoint tuples, where the cover
  // test is defined; distinct equal-length words always qualify.
  SUBCASE("bernoulli full shift, trivial factor") {
    RandomSFT sys = full_shift(2);
    RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
    PinskerScenario sc = PinskerScenario::trivial();
    // Heavily overlapping complements converge slowly (the antipodal pairs
    // sit near 0.099 at window two), so the threshold is set below that
    // plateau; the support set itself does not depend on tau.
    for (int res = 1; res <= 2; ++res) {
      std::vector<std::vector<Word>> support = tuple_set_from_support(sys, mu, sc, 2, res);
      std::vector<std::vector<Word>> accepted;
      for (const Word& a : all_words(2, res))
        for (const Word& b : all_words(2, res)) {
          if (a == b) continue;
          if (measure_tuple_test(sys, mu, pair_query(a, b, res, 0.05)).accept)
            accepted.push_back({a, b});
        }
      std::sort(accepted.begin(), accepted.end());
      CHECK(support == accepted);
    }
  }
  SUBCASE("periodic fiber, full factor") {
    RandomSFT sys = periodic_pair();
    RelativeMarkovMeasure mu = atomic_pair_measure();
    PinskerScenario sc = PinskerScenario::full();
    std::vector<std::vector<Word>> support = tuple_set_from_support(sys, mu, sc, 2, 2);
    std::vector<std::vector<Word>> accepted;
    std::vector<Word> lang = {{0, 0}, {1, 1}};
    for (const Word& a : lang)
      for (const Word& b : lang) {
        if (a == b) continue;
        if (measure_tuple_test(sys, mu, pair_query(a, b, 2)).accept)
          accepted.push_back({a, b});
      }
    CHECK(support.empty());
    CHECK(accepted.empty());
  }
}

TEST_CASE("mixture acceptance set is the union of the component acceptance sets") {
  RandomSFT sys = two_block();
  RelativeMarkovMeasure a = block_a_measure();
  RelativeMarkovMeasure b = block_b_measure();
  RelativeMarkovMeasure mix = block_mix_measure();

  std::vector<std::pair<int, int>> accepted;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      if (x == y) continue;
      TupleQuery q = pair_query({x}, {y}, 3);
      bool in_a = measure_tuple_test(sys, a, q).accept;
      bool in_b = measure_tuple_test(sys, b, q).accept;
      bool in_mix = measure_tuple_test(sys, mix, q).accept;
      CHECK(in_mix == (in_a || in_b));
      if (in_mix) accepted.push_back({x, y});
    }
  std::vector<std::pair<int, int>> expect = {{0, 1}, {1, 0}};
  CHECK(accepted == expect);
}

TEST_CASE("positivity probe: three readings agree on both verdicts") {
  SUBCASE("full shift pair: everything positive, exact values") {
    RandomSFT sys = full_shift(2);
    RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
    TupleQuery q = pair_query({0}, {1}, 1);
    ProbeReport rep =
        positivity_equivalence_probe(sys, mu, q, PinskerScenario::trivial(), 7);
    CHECK(rep.inf_normalized == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(rep.h_estimate == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(rep.lambda_mass == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.inf_positive);
    CHECK(rep.h_positive);
    CHECK(rep.mass_positive);
    CHECK(rep.consistent);
    CHECK(!rep.caveat.empty());
  }
  SUBCASE("periodic pair: everything at or below threshold") {
    RandomSFT sys = periodic_pair();
    RelativeMarkovMeasure mu = atomic_pair_measure();
    TupleQuery q = pair_query({0}, {1}, 1);
    ProbeReport rep =
        positivity_equivalence_probe(sys, mu, q, PinskerScenario::full(), 7);
    CHECK(rep.inf_normalized == doctest::Approx(kLog2 / 7).epsilon(1e-12));
    CHECK(rep.h_estimate == 0.0);
    CHECK(rep.lambda_mass == 0.0);
    CHECK(!rep.inf_positive);
    CHECK(!rep.h_positive);
    CHECK(!rep.mass_positive);
    CHECK(rep.consistent);
  }
  SUBCASE("golden mean pair: positive and consistent") {
    RandomSFT sys = golden_mean();
    RelativeMarkovMeasure mu = parry_measure(sys);
    TupleQuery q = pair_query({0}, {1, 0}, 6);
    ProbeReport rep =
        positivity_equivalence_probe(sys, mu, q, PinskerScenario::trivial(), 6);
    CHECK(rep.inf_positive);
    CHECK(rep.h_positive);
    CHECK(rep.mass_positive);
    CHECK(rep.consistent);
  }
  SUBCASE("budget validation") {
    RandomSFT sys = full_shift(2);
    RelativeMarkovMeasure mu = bernoulli_measure(sys, {0.5, 0.5});
    TupleQuery q = pair_query({0}, {1}, 1);
    CHECK_THROWS_AS(
        positivity_equivalence_probe(sys, mu, q, PinskerScenario::trivial(), 0),
        validation_error);
    CHECK_THROWS_AS(
        positivity_equivalence_probe(sys, mu, q, PinskerScenario::trivial(), 21),
        bound_error);
  }
}
