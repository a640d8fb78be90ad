#include "amentropy/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amentropy/emit.hpp"
#include "amentropy/scenario.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace amentropy;

namespace {

struct RunResult {
  int code{0};
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream f(path);
  f << text;
  return path;
}

std::string scenario(const std::string& name) {
  return shipped_scenario_dir() + "/" + name + ".json";
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("result rendering: shortest round-trip doubles and canonical order") {
  std::vector<ResultRow> rows;
  ResultRow a{"entropy", "s", "nmax=2", "alpha", 2, 0.75, "0", "t1"};
  ResultRow b{"entropy", "s", "nmax=2", "alpha", 1, 1e-9, "0", "t1"};
  ResultRow c{"entropy", "s", "nmax=2", "alpha", -1, 2.0, "0", "t1"};
  rows = {a, b, c};
  std::string forward = render_results(rows, EmitFormat::csv);
  rows = {c, a, b};
  std::string shuffled = render_results(rows, EmitFormat::csv);
  CHECK(forward == shuffled);
  CHECK(forward.find("alpha,2,0.75,") != std::string::npos);
  CHECK(forward.find("alpha,1,1e-09,") != std::string::npos);
  // n = -1 renders as an empty window column
  CHECK(forward.find("alpha,,2,") != std::string::npos);
  CHECK(forward.rfind("command,scenario,params,quantity,n,value,tol,anchor\n", 0) == 0);

  std::string jl = render_results({a}, EmitFormat::jsonl);
  nlohmann::json j = nlohmann::json::parse(jl);
  CHECK(j["value"] == 0.75);
  CHECK(j["n"] == 2);
  std::string jn = render_results({c}, EmitFormat::jsonl);
  CHECK(nlohmann::json::parse(jn)["n"].is_null());
}

TEST_CASE("csv escaping quotes fields holding commas or quotes") {
  ResultRow r{"tuples", "s", "pair=[0],[1]", "v", 1, 0.0, "0", "t"};
  std::string csv = render_results({r}, EmitFormat::csv);
  CHECK(csv.find("\"pair=[0],[1]\"") != std::string::npos);
}

TEST_CASE("shipped scenarios all load and validate") {
  for (const char* name : {"full2shift", "indicator2shift", "goldenmean", "alternating",
                           "periodic", "mixture", "twocycle_bernoulli"}) {
    Scenario sc = load_scenario(scenario(name));
    CHECK(sc.id == name);
    CHECK(sc.window_bound >= 1);
  }
  Scenario mix = load_scenario(scenario("mixture"));
  CHECK(mix.measures.size() == 3);
  // empty name picks the alphabetically first measure
  CHECK(mix.find_measure("") == &mix.measures.begin()->second);
  CHECK(mix.find_measure("nosuch") == nullptr);
}

TEST_CASE("scenario parse errors name the failing section") {
  std::string bad = write_temp(
      "amentropy_bad_matrix.json",
      R"({"id":"bad","driver":{"kind":"point"},"alphabet":2,)"
      R"("matrices":[[[1,2],[1,1]]],"cover":{"kind":"letters"}})");
  CHECK_THROWS_WITH(load_scenario(bad), "scenario matrices: entries must be 0 or 1");
  CHECK_THROWS_WITH(load_scenario("/nonexistent/x.json"),
                    "scenario file not readable: /nonexistent/x.json");
}

TEST_CASE("exit codes: validation 2, bounds 3, success 0") {
  std::string bad = write_temp(
      "amentropy_bad_matrix2.json",
      R"({"id":"bad","driver":{"kind":"point"},"alphabet":2,)"
      R"("matrices":[[[1,2],[1,1]]],"cover":{"kind":"letters"}})");
  RunResult r = run({"entropy", "--scenario", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("entries must be 0 or 1") != std::string::npos);

  r = run({"entropy", "--scenario", scenario("full2shift"), "--nmax", "25"});
  CHECK(r.code == 3);
  CHECK(r.err.find("exceeds the scenario bound 20") != std::string::npos);

  r = run({"frobnicate"});
  CHECK(r.code == 2);

  r = run({"vp", "--scenario", scenario("full2shift"), "--emit", "yaml"});
  CHECK(r.code == 2);
  CHECK(r.err.find("emit format") != std::string::npos);

  r = run({"tuples", "--scenario", scenario("full2shift"), "--pair", "[0],[0]", "--N", "4"});
  CHECK(r.code == 2);
  CHECK(r.err.find("pairwise disjoint") != std::string::npos);

  r = run({"tuples", "--scenario", scenario("full2shift"), "--pair", "[0],(1]", "--N", "4"});
  CHECK(r.code == 2);
  CHECK(r.err.find("position") != std::string::npos);

  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("tile") != std::string::npos);
}

TEST_CASE("identical scenario and seed give byte-identical csv") {
  std::vector<std::string> args = {"vp",      "--scenario", scenario("alternating"),
                                   "--window", "10",        "--budget",
                                   "800",     "--restarts", "3",
                                   "--seed",  "9"};
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("vp_value") != std::string::npos);
  CHECK(a.out.find("seed=9") != std::string::npos);
}

TEST_CASE("worker count never changes the emitted bytes") {
  std::vector<std::string> base = {"entropy", "--scenario", scenario("goldenmean"),
                                   "--nmax", "6"};
  RunResult one = run(base);
  std::vector<std::string> four = base;
  four.insert(four.end(), {"--jobs", "4"});
  RunResult par = run(four);
  std::vector<std::string> solo = base;
  solo.insert(solo.end(), {"--jobs", "1"});
  RunResult ser = run(solo);
  CHECK(one.code == 0);
  CHECK(one.out == par.out);
  CHECK(one.out == ser.out);
}

TEST_CASE("entropy emits topological and per-measure rows") {
  RunResult r = run({"entropy", "--scenario", scenario("goldenmean"), "--nmax", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("topological_estimate,6,") != std::string::npos);
  CHECK(r.out.find("measure=parry") != std::string::npos);
  CHECK(r.out.find("measure_rate_closed_form") != std::string::npos);
  // 6 topological rows + estimate + 6 measure rows + estimate + rate + header
  CHECK(count_lines(r.out) == 16);
}

TEST_CASE("pressure rows carry the sup column for additive potentials") {
  RunResult r = run({"pressure", "--scenario", scenario("indicator2shift"), "--nmax", "5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pressure_estimate,5,") != std::string::npos);
  CHECK(r.out.find("potential_sup_estimate,5,1,") != std::string::npos);
  double loge = std::log1p(std::exp(1.0));
  std::string needle = "pressure_normalized,5,";
  std::size_t pos = r.out.find(needle);
  REQUIRE(pos != std::string::npos);
  double v = std::stod(r.out.substr(pos + needle.size()));
  CHECK(std::abs(v - loge) <= 1e-9);
}

TEST_CASE("tuples subcommand reports both detectors and the probe") {
  RunResult r = run({"tuples", "--scenario", scenario("full2shift"), "--pair", "[0],[1]",
                     "--N", "6", "--tau", "0.1", "--probe", "6", "--emit", "jsonl"});
  CHECK(r.code == 0);
  double log2 = std::log(2.0);
  int seen = 0;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    std::string q = j["quantity"];
    if (q == "topological_tuple_value" || q == "measure_tuple_value") {
      ++seen;
      CHECK(std::abs(double(j["value"]) - log2) <= 1e-9);
      CHECK(std::string(j["params"]).find("accept=1") != std::string::npos);
    }
    if (q == "probe_lambda_mass") {
      ++seen;
      CHECK(double(j["value"]) == 0.25);
      CHECK(std::string(j["params"]).find("consistent=1") != std::string::npos);
    }
  }
  CHECK(seen == 3);
}

TEST_CASE("subadd emits the strict-gap pair") {
  RunResult r = run({"subadd"});
  CHECK(r.code == 0);
  CHECK(r.out.find("witness=1+2+4+5+6+8") != std::string::npos);
  CHECK(r.out.find("inf_over_windows,,0.6666666666666666,") != std::string::npos);
  CHECK(r.out.find("limit_estimate,64,0.75,") != std::string::npos);
  CHECK(r.out.find("packing_deficiency_S,,2,") != std::string::npos);
}

TEST_CASE("tile certifies and reports the placement counts") {
  RunResult r = run({"tile", "--window", "120", "--eps", "0.2"});
  CHECK(r.code == 0);
  std::string needle = "cover_fraction,,";
  std::size_t pos = r.out.find(needle);
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + needle.size())) >= 0.8);
  CHECK(r.out.find("tile_translates,16,") != std::string::npos);
}

TEST_CASE("props runs every battery and exits by failure count") {
  RunResult r = run({"props", "--count", "40", "--seed", "11"});
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 10);  // header + 9 suites
  CHECK(r.out.find("cover_oracle,,0,") != std::string::npos);
  CHECK(r.out.find("gibbs,,0,") != std::string::npos);

  RunResult bad = run({"props", "--count", "0"});
  CHECK(bad.code == 2);
}

TEST_CASE("results can be written to a file") {
  std::string path =
      (std::filesystem::temp_directory_path() / "amentropy_out.csv").string();
  RunResult r = run({"subadd", "--nmax", "8", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  CHECK(first == "command,scenario,params,quantity,n,value,tol,anchor");
}
