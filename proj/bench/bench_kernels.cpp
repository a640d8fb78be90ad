// Serial-reference vs OpenMP comparison for the window-sweep kernels.
// Each benchmark runs twice: jobs=1 pins the serial path, jobs=0 restores
// the hardware default so the parallel speedup is visible side by side.

#include <benchmark/benchmark.h>

#include "amentropy/bundle.hpp"
#include "amentropy/measures.hpp"
#include "amentropy/scenario.hpp"
#include "amentropy/subadditive.hpp"
#include "amentropy/windows.hpp"

using namespace amentropy;

namespace {

const Scenario& shipped(const char* name) {
  static std::map<std::string, Scenario> cache;
  auto it = cache.find(name);
  if (it == cache.end())
    it = cache.emplace(name, load_scenario(shipped_scenario_dir() + "/" + name + ".json"))
             .first;
  return it->second;
}

void BM_topological_entropy(benchmark::State& state) {
  par::set_jobs(static_cast<int>(state.range(0)));
  const Scenario& sc = shipped("goldenmean");
  FolnerSequence seq = FolnerSequence::boxes(1);
  for (auto _ : state) {
    EstimateReport rep = fiber_topological_entropy(sc.sys, sc.cover, seq, 16);
    benchmark::DoNotOptimize(rep.estimate);
  }
  par::set_jobs(0);
}

void BM_cover_entropy(benchmark::State& state) {
  par::set_jobs(static_cast<int>(state.range(0)));
  const Scenario& sc = shipped("goldenmean");
  const RelativeMarkovMeasure* mu = sc.find_measure("");
  FolnerSequence seq = FolnerSequence::boxes(1);
  for (auto _ : state) {
    CoverEntropyReport rep = fiber_cover_entropy_estimate(sc.sys, *mu, sc.cover, seq, 16);
    benchmark::DoNotOptimize(rep.est.estimate);
  }
  par::set_jobs(0);
}

void BM_pressure(benchmark::State& state) {
  par::set_jobs(static_cast<int>(state.range(0)));
  const Scenario& sc = shipped("indicator2shift");
  FolnerSequence seq = FolnerSequence::boxes(1);
  for (auto _ : state) {
    EstimateReport rep = pressure_estimate(sc.sys, sc.potential, sc.cover, seq, 11);
    benchmark::DoNotOptimize(rep.estimate);
  }
  par::set_jobs(0);
}

void BM_optimize_vp(benchmark::State& state) {
  par::set_jobs(static_cast<int>(state.range(0)));
  const Scenario& sc = shipped("alternating");
  for (auto _ : state) {
    VPResult r = optimize_vp(sc.sys, sc.potential, sc.cover, 10, 2000, 4, 9);
    benchmark::DoNotOptimize(r.value);
  }
  par::set_jobs(0);
}

void BM_property_checks(benchmark::State& state) {
  par::set_jobs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Window s_set = window_union(
        window_union(Window::singleton(Pt{1}), Window::singleton(Pt{2})),
        Window::singleton(Pt{4}));
    SetFunction f = make_packing_deficiency(s_set, 64);
    PropertyReport rep = check_properties(f, 6, 0, 1);
    benchmark::DoNotOptimize(rep.items.size());
  }
  par::set_jobs(0);
}

}  // namespace

BENCHMARK(BM_topological_entropy)->ArgName("jobs")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cover_entropy)->ArgName("jobs")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pressure)->ArgName("jobs")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_optimize_vp)->ArgName("jobs")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_property_checks)->ArgName("jobs")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
