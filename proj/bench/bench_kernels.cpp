// Serial reference vs OpenMP for the two data-parallel kernels: the grid
// feasibility oracle and the parameter sweep.

#include "safesmc/config.hpp"
#include "safesmc/sweep.hpp"
#include "safesmc/verify.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace safesmc;

void BM_OracleSerial(benchmark::State& state) {
    const Grid grid;
    for (auto _ : state) benchmark::DoNotOptimize(feasibility_margin_serial(1.6995, 1.2658, 39.66, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.size()));
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
    const Grid grid;
    for (auto _ : state) benchmark::DoNotOptimize(feasibility_margin(1.6995, 1.2658, 39.66, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.size()));
}
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

ScenarioConfig short_s1a() {
    auto c = demo_config("robot-s1a");
    c.t_end = 1.0;
    c.dt = 1e-3;
    return c;
}

const std::vector<double> kHbarValues = {0.5, 1.0, 2.0, 4.0};

void BM_SweepSerial(benchmark::State& state) {
    const auto base = short_s1a();
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(base, "h_bar", kHbarValues));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
    const auto base = short_s1a();
    for (auto _ : state) benchmark::DoNotOptimize(sweep(base, "h_bar", kHbarValues));
}
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
