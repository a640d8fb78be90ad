#include "amentropy/cli.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amentropy/acceptance.hpp"
#include "amentropy/batteries.hpp"
#include "amentropy/bundle.hpp"
#include "amentropy/emit.hpp"
#include "amentropy/measures.hpp"
#include "amentropy/quasitile.hpp"
#include "amentropy/scenario.hpp"
#include "amentropy/subadditive.hpp"
#include "amentropy/tuples.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

namespace {

// Anchor tags grouped per emitted quantity.
constexpr const char* kAnchorQuasiTile = "ow-prop";
constexpr const char* kAnchorPacking = "1104071212";
constexpr const char* kAnchorInfWindows = "1102111944";
constexpr const char* kAnchorLimit = "1006122129";
constexpr const char* kAnchorTopEntropy = "1007120926";
constexpr const char* kAnchorMeasureEntropy = "0906282008";
constexpr const char* kAnchorPressure = "1007052308";
constexpr const char* kAnchorVP = "1007141414";
constexpr const char* kAnchorProbe = "1006301434";

std::string battery_anchor(const std::string& suite) {
  if (suite == "indicator_identity") return "1008300008";
  if (suite == "indicator_decomposition") return "1202111848";
  if (suite == "gibbs") return "1007131745";
  if (suite == "chain_rule") return "1007021626";
  if (suite == "mixture_bounds") return "1007222138";
  if (suite == "affinity") return "1008052343";
  if (suite == "sandwich") return "1102041733";
  if (suite == "truncation") return "1010222039";
  if (suite == "cover_oracle") return "1006291640";
  return "unmapped";
}

void check_window_bound(int n, const Scenario& sc) {
  if (n > sc.window_bound)
    throw bound_error("window " + std::to_string(n) + " exceeds the scenario bound " +
                      std::to_string(sc.window_bound));
}

// "[0],[1]" or "[0,1],[1,0],..." -> one word per bracket group.
std::vector<Word> parse_cylinders(const std::string& text) {
  std::vector<Word> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw validation_error("pair list: " + what + " at position " + std::to_string(i));
  };
  auto skip = [&] {
    while (i < text.size() && text[i] == ' ') ++i;
  };
  skip();
  while (i < text.size()) {
    if (text[i] != '[') fail("expected '['");
    ++i;
    Word w;
    for (;;) {
      skip();
      std::size_t start = i;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) != 0))
        ++i;
      if (i == start) fail("expected a letter index");
      w.push_back(std::stoi(text.substr(start, i - start)));
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    if (i >= text.size() || text[i] != ']') fail("expected ']'");
    ++i;
    out.push_back(std::move(w));
    skip();
    if (i < text.size()) {
      if (text[i] != ',') fail("expected ',' between cylinders");
      ++i;
      skip();
    }
  }
  if (out.empty()) fail("no cylinders given");
  return out;
}

std::string cylinder_str(const Word& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(w[i]);
  }
  return s + "]";
}

struct EmitSink {
  std::vector<ResultRow> rows;
  std::string command;
  std::string scenario = "-";
  std::string params;

  void add(const std::string& quantity, int n, double value, const std::string& tol,
           const std::string& anchor, const std::string& extra_params = "") {
    ResultRow r;
    r.command = command;
    r.scenario = scenario;
    r.params = extra_params.empty() ? params
               : params.empty()     ? extra_params
                                    : params + " " + extra_params;
    r.quantity = quantity;
    r.n = n;
    r.value = value;
    r.tol = tol;
    r.anchor = anchor;
    rows.push_back(std::move(r));
  }
};

void flush(EmitSink& sink, const std::string& emit, const std::string& out_path,
           std::ostream& out) {
  EmitFormat fmt = parse_emit_format(emit);
  if (out_path.empty() || out_path == "-")
    out << render_results(std::move(sink.rows), fmt);
  else
    write_results(std::move(sink.rows), fmt, out_path);
}

int print_acceptance(std::ostream& out) {
  std::vector<CriterionResult> results = run_acceptance();
  int failed = 0;
  double total = 0;
  char line[256];
  for (const CriterionResult& r : results) {
    total += r.seconds;
    if (!r.pass) ++failed;
    std::snprintf(line, sizeof line, "criterion %2d  %s  %6.2fs / %.0fs  %s", r.number,
                  r.pass ? "PASS" : "FAIL", r.seconds, r.budget_seconds, r.title.c_str());
    out << line << "\n              " << r.detail << "\n";
  }
  std::snprintf(line, sizeof line, "acceptance: %zu/%zu criteria passed in %.1fs",
                results.size() - static_cast<std::size_t>(failed), results.size(), total);
  out << line << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Folner-window entropy calculus for random SFT bundles"};
  app.require_subcommand(1);

  std::string scenario_path, pair_text, emit = "csv", out_path;
  std::string measure_name;
  int nmax = 0, window = 0, resolution = 8, jobs = 0, restarts = 4, probe_budget = 0;
  long long budget = 4000, count = 500;
  double eps = 0.2, tau = 0.1;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub, bool with_scenario) {
    if (with_scenario)
      sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--emit", emit, "output format: csv or jsonl");
    sub->add_option("--out", out_path, "output path ('-' for stdout)");
    sub->add_option("--jobs", jobs, "worker threads (0 = hardware default)");
  };

  CLI::App* tile = app.add_subcommand("tile", "quasi-tile an interval by dyadic tiles");
  tile->add_option("--nmax", nmax, "largest dyadic tile exponent (default 4)");
  tile->add_option("--window", window, "target interval length (default 200)");
  tile->add_option("--eps", eps, "disjointness/cover parameter");
  add_common(tile, false);

  CLI::App* subadd = app.add_subcommand(
      "subadd", "packing-deficiency calculus: inf over windows and the tiling limit");
  subadd->add_option("--window", window, "element range for the inf (default 12)");
  subadd->add_option("--nmax", nmax, "largest limit window (default 64)");
  add_common(subadd, false);

  CLI::App* entropy =
      app.add_subcommand("entropy", "fiber topological and measure entropy estimates");
  entropy->add_option("--nmax", nmax, "largest window (default: scenario bound)");
  add_common(entropy, true);

  CLI::App* pressure = app.add_subcommand("pressure", "fiber pressure estimates");
  pressure->add_option("--nmax", nmax, "largest window (default: scenario bound)");
  add_common(pressure, true);

  CLI::App* vp =
      app.add_subcommand("vp", "variational-principle optimizer over Markov measures");
  vp->add_option("--window", window, "optimization window length (default 12)");
  vp->add_option("--budget", budget, "evaluation budget");
  vp->add_option("--restarts", restarts, "optimizer restarts");
  vp->add_option("--seed", seed, "optimizer seed (default: scenario seed)");
  add_common(vp, true);

  CLI::App* tuples = app.add_subcommand("tuples", "entropy tuple detectors");
  tuples->add_option("--pair", pair_text, "cylinder list, e.g. \"[0],[1]\"")->required();
  tuples->add_option("--N", resolution, "test resolution window");
  tuples->add_option("--tau", tau, "acceptance threshold");
  tuples->add_option("--measure", measure_name, "measure name (default: first)");
  tuples->add_option("--probe", probe_budget,
                     "also run the positivity probe with this window budget");
  add_common(tuples, true);

  CLI::App* props = app.add_subcommand("props", "seeded exact-inequality batteries");
  props->add_option("--count", count, "trials per suite");
  props->add_option("--seed", seed, "battery seed");
  add_common(props, false);

  CLI::App* accept =
      app.add_subcommand("accept", "run the acceptance criteria and print the table");

  try {
    std::vector<const char*> argv;
    argv.push_back("amentropy");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  seed_set = vp->count("--seed") > 0 || props->count("--seed") > 0;

  try {
    parse_emit_format(emit);  // fail fast, before any computation
    if (jobs > 0) par::set_jobs(jobs);

    if (*accept) return print_acceptance(out);

    if (*props) {
      if (!seed_set) seed = 1;
      if (count < 1) throw validation_error("props: --count must be positive");
      std::vector<BatterySuiteResult> suites = run_batteries(count, seed);
      EmitSink sink;
      sink.command = "props";
      sink.params = "trials=" + std::to_string(count) + " seed=" + std::to_string(seed);
      long long failures = 0;
      for (const BatterySuiteResult& s : suites) {
        failures += s.failures;
        sink.add(s.name, -1, static_cast<double>(s.failures), "0", battery_anchor(s.name));
        if (s.failures > 0) err << s.name << ": " << s.detail << "\n";
      }
      flush(sink, emit, out_path, out);
      return failures == 0 ? 0 : 1;
    }

    if (*tile) {
      if (nmax == 0) nmax = 4;
      if (window == 0) window = 200;
      if (nmax < 0 || nmax > 20) throw validation_error("tile: --nmax outside 0..20");
      if (window < 1) throw validation_error("tile: --window must be positive");
      std::vector<Window> tiles_in;
      for (int i = 0; i <= nmax; ++i) tiles_in.push_back(Window::interval(0, (1 << i) - 1));
      QuasiTiling qt = quasi_tile(tiles_in, Window::interval(0, window - 1), eps);
      qt.verify();
      EmitSink sink;
      sink.command = "tile";
      sink.params = "nmax=" + std::to_string(nmax) + " window=" + std::to_string(window) +
                    " eps=" + format_double(eps);
      sink.add("cover_fraction", -1, qt.cover_fraction, format_double(eps), kAnchorQuasiTile);
      for (std::size_t i = 0; i < qt.tiles.size(); ++i)
        sink.add("tile_translates", static_cast<int>(qt.tiles[i].size()),
                 static_cast<double>(qt.centers[i].size()), "0", kAnchorQuasiTile);
      flush(sink, emit, out_path, out);
      return 0;
    }

    if (*subadd) {
      if (window == 0) window = 12;
      if (nmax == 0) nmax = 64;
      if (window < 1 || nmax < 1)
        throw validation_error("subadd: --window and --nmax must be positive");
      Window s_set = window_union(
          window_union(Window::singleton(Pt{1}), Window::singleton(Pt{2})),
          Window::singleton(Pt{4}));
      SetFunction f = make_packing_deficiency(
          s_set, std::max(64LL, static_cast<long long>(nmax)));
      check_properties(f, 6, 0, 1);
      EmitSink sink;
      sink.command = "subadd";
      sink.params = "window=" + std::to_string(window) + " nmax=" + std::to_string(nmax);
      InfWindowsResult inf = inf_over_windows(f, window, 8);
      std::string witness = "witness=";
      for (std::size_t i = 0; i < inf.witness.points().size(); ++i) {
        if (i) witness += '+';
        witness += std::to_string(inf.witness.points()[i][0]);
      }
      sink.add("packing_deficiency_S", -1, f(s_set), "0", kAnchorPacking);
      sink.add("inf_over_windows", -1, inf.value, "0", kAnchorInfWindows, witness);
      LimitReport lim = limit_along(f, FolnerSequence::boxes(1), nmax);
      for (const LimitRow& r : lim.rows)
        sink.add("limit_normalized", static_cast<int>(r.n), r.normalized, "0", kAnchorLimit);
      sink.add("limit_estimate", nmax, lim.estimate, "0", kAnchorLimit);
      flush(sink, emit, out_path, out);
      return 0;
    }

    Scenario sc = load_scenario(scenario_path);
    EmitSink sink;
    sink.scenario = sc.id;

    if (*entropy) {
      if (nmax == 0) nmax = sc.window_bound;
      check_window_bound(nmax, sc);
      sink.command = "entropy";
      sink.params = "nmax=" + std::to_string(nmax);
      EstimateReport ht =
          fiber_topological_entropy(sc.sys, sc.cover, FolnerSequence::boxes(1), nmax);
      for (const EstimateRow& r : ht.rows)
        sink.add("topological_normalized", r.n, r.normalized, "0", kAnchorTopEntropy);
      sink.add("topological_estimate", nmax, ht.estimate, "0", kAnchorTopEntropy);
      for (const auto& [name, mu] : sc.measures) {
        CoverEntropyReport ce =
            fiber_cover_entropy_estimate(sc.sys, mu, sc.cover, FolnerSequence::boxes(1), nmax);
        std::string mp = "measure=" + name;
        for (const EstimateRow& r : ce.est.rows)
          sink.add("measure_normalized", r.n, r.normalized, "0", kAnchorMeasureEntropy, mp);
        sink.add("measure_estimate", nmax, ce.est.estimate, "0", kAnchorMeasureEntropy, mp);
        sink.add("measure_rate_closed_form", -1, ce.closed_form_rate, "0",
                 kAnchorMeasureEntropy, mp);
      }
      flush(sink, emit, out_path, out);
      return 0;
    }

    if (*pressure) {
      if (nmax == 0) nmax = sc.window_bound;
      check_window_bound(nmax, sc);
      sink.command = "pressure";
      sink.params = "nmax=" + std::to_string(nmax);
      EstimateReport pr =
          pressure_estimate(sc.sys, sc.potential, sc.cover, FolnerSequence::boxes(1), nmax);
      for (const EstimateRow& r : pr.rows)
        sink.add("pressure_normalized", r.n, r.normalized, "0", kAnchorPressure);
      sink.add("pressure_estimate", nmax, pr.estimate, "0", kAnchorPressure);
      if (pr.sup_estimate)
        sink.add("potential_sup_estimate", nmax, *pr.sup_estimate, "0", kAnchorPressure);
      flush(sink, emit, out_path, out);
      return 0;
    }

    if (*vp) {
      if (window == 0) window = 12;
      check_window_bound(window, sc);
      if (!seed_set) seed = sc.seed;
      sink.command = "vp";
      sink.params = "window=" + std::to_string(window) + " budget=" + std::to_string(budget) +
                    " restarts=" + std::to_string(restarts) +
                    " seed=" + std::to_string(seed);
      VPResult r = optimize_vp(sc.sys, sc.potential, sc.cover, window, budget, restarts, seed);
      sink.add("vp_value", window, r.value, "0", kAnchorVP);
      sink.add("vp_entropy", window, r.h, "0", kAnchorVP);
      sink.add("vp_potential", window, r.mu_d, "0", kAnchorVP);
      sink.add("vp_pressure_ref", window, r.pressure_ref, "0", kAnchorVP);
      sink.add("vp_max_candidate", window, r.max_candidate, "0", kAnchorVP);
      flush(sink, emit, out_path, out);
      return 0;
    }

    if (*tuples) {
      check_window_bound(resolution, sc);
      TupleQuery q;
      q.prefixes = parse_cylinders(pair_text);
      q.resolution = resolution;
      q.tau = tau;
      sink.command = "tuples";
      std::string pair_echo = "pair=";
      for (std::size_t i = 0; i < q.prefixes.size(); ++i) {
        if (i) pair_echo += ',';
        pair_echo += cylinder_str(q.prefixes[i]);
      }
      sink.params = pair_echo + " N=" + std::to_string(resolution) +
                    " tau=" + format_double(tau);
      TupleDecision top = topological_tuple_test(sc.sys, q);
      sink.add("topological_tuple_value", resolution, top.value, format_double(tau),
               kAnchorTopEntropy, top.accept ? "accept=1" : "accept=0");
      const RelativeMarkovMeasure* mu = sc.find_measure(measure_name);
      if (!measure_name.empty() && mu == nullptr)
        throw validation_error("scenario has no measure named '" + measure_name + "'");
      if (mu != nullptr) {
        TupleDecision mea = measure_tuple_test(sc.sys, *mu, q);
        sink.add("measure_tuple_value", resolution, mea.value, format_double(tau),
                 kAnchorMeasureEntropy, mea.accept ? "accept=1" : "accept=0");
        if (probe_budget > 0) {
          if (!sc.pinsker)
            throw validation_error(
                "positivity probe needs a declared pinsker mode in the scenario");
          ProbeReport pr = positivity_equivalence_probe(sc.sys, *mu, q, *sc.pinsker,
                                                        probe_budget);
          std::string pp = "probe_budget=" + std::to_string(probe_budget) +
                           (pr.consistent ? " consistent=1" : " consistent=0");
          sink.add("probe_inf_normalized", -1, pr.inf_normalized, format_double(tau),
                   kAnchorProbe, pp);
          sink.add("probe_h_estimate", -1, pr.h_estimate, format_double(tau), kAnchorProbe,
                   pp);
          sink.add("probe_lambda_mass", -1, pr.lambda_mass, "0", kAnchorProbe, pp);
        }
      }
      flush(sink, emit, out_path, out);
      return 0;
    }
  } catch (const insufficient_invariance_error& e) {
    err << "bound error: " << e.what()
        << " (achieved fraction " << format_double(e.achieved_fraction) << ")\n";
    return 3;
  } catch (const bound_error& e) {
    err << "bound error: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace amentropy
