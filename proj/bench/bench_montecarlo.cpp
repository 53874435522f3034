// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "rpo/montecarlo.hpp"
#include "rpo/scenario.hpp"

namespace {

rpo::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? rpo::Execution::serial : rpo::Execution::parallel;
}

void BM_PruneMonteCarlo(benchmark::State& state) {
  rpo::PruneMcConfig cfg;
  cfg.trials = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rpo::prune_monte_carlo(cfg, mode(state)).exclusion_rate());
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_PruneMonteCarlo)->ArgNames({"parallel", "trials"})->Args({0, 10000})->Args({1, 10000});

void BM_LinearLoop(benchmark::State& state) {
  rpo::LinearLoopConfig cfg;
  cfg.trials = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rpo::linear_loop_trials(cfg, mode(state)).stealth_rate());
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_LinearLoop)->ArgNames({"parallel", "trials"})->Args({0, 16})->Args({1, 16})->Unit(benchmark::kMillisecond);

void BM_StrategySweep(benchmark::State& state) {
  rpo::ScenarioConfig cfg;
  cfg.duration = 10.0;
  cfg.attack.schedule.start_time = 4.0;
  cfg.trajectory.body_offset = cfg.robot.offset;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rpo::run_strategy_sweep(cfg, state.range(0) != 0).size());
  }
}
BENCHMARK(BM_StrategySweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
