#include <benchmark/benchmark.h>

#include "gasadapt/controller.hpp"
#include "gasadapt/estimators.hpp"
#include "gasadapt/fixtures.hpp"
#include "gasadapt/integrator.hpp"
#include "gasadapt/nlp.hpp"

using namespace gasadapt;

namespace {

PipeProperties bench_pipe() {
  const double d = 0.6;
  return {10000.0, d, circle_area(d), 0.01, 0.002};
}

void BM_Integrate(benchmark::State& state) {
  const auto level = model_level_from_int(static_cast<int>(state.range(0))).value();
  const int n = static_cast<int>(state.range(1));
  const auto pipe = bench_pipe();
  const auto grid = Grid::with_intervals(pipe.length, n);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(level, pipe, GasParameters{}, 60e5, 100.0, grid));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Integrate)->ArgsProduct({{1, 2, 3}, {64, 4096}});

void BM_PipeEstimate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto pipe = bench_pipe();
  const auto grid = Grid::with_intervals(pipe.length, n);
  for (auto _ : state)
    benchmark::DoNotOptimize(total_error(pipe, GasParameters{}, 60e5, 100.0, ModelLevel::NoRam, grid));
}
BENCHMARK(BM_PipeEstimate)->Arg(64)->Arg(1024);

void BM_NetworkEstimate(benchmark::State& state) {
  const auto f = tree_12();
  const auto inst = NlpInstance::assemble(f.network, f.scenario, f.gas,
                                          uniform_state(f.network, ModelLevel::FrictionOnly, 256));
  const auto sol = solve(inst);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_network(f.network, f.gas, sol, sol.state, threads));
}
BENCHMARK(BM_NetworkEstimate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_NlpSolve(benchmark::State& state) {
  const auto f = tree_12();
  const auto inst = NlpInstance::assemble(f.network, f.scenario, f.gas,
                                          uniform_state(f.network, ModelLevel::Full, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst));
  state.counters["variables"] = inst.num_variables();
}
BENCHMARK(BM_NlpSolve)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AdaptiveRun(benchmark::State& state) {
  const auto f = make_fixture(state.range(0) == 0 ? "chain-5" : "tree-12");
  AdaptiveConfig c;
  c.eps = bar_to_pascal(1e-4);
  for (auto _ : state) benchmark::DoNotOptimize(run(f.network, f.scenario, f.gas, c));
}
BENCHMARK(BM_AdaptiveRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
