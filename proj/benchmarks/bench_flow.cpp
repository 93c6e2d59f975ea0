#include <benchmark/benchmark.h>

#include "shearmix/chains.hpp"
#include "shearmix/flow.hpp"

using namespace shearmix;

static void BM_Step(benchmark::State& state) {
    const auto model = pierrehumbert();
    TorusPoint x{1.0, 2.0};
    for (auto _ : state) {
        x = step_point(x, 3.1, 7.2, model);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_Step);

static void BM_TangentTrajectory(benchmark::State& state) {
    const auto model = pierrehumbert();
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto sched = sample_schedule(1, m, 10.0);
    for (auto _ : state) {
        TangentState s{{1.0, 2.0}, {1.0, 0.0}, 0.0};
        for (std::size_t i = 0; i < m; ++i) s = tangent_step(s, sched.horizontal(i), sched.vertical(i), model, true);
        benchmark::DoNotOptimize(s.log_norm);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TangentTrajectory)->Arg(100)->Arg(10000);

static void BM_SampleSchedule(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sample_schedule(7, 1000, 10.0).durations.data());
}
BENCHMARK(BM_SampleSchedule);

BENCHMARK_MAIN();
