#include <benchmark/benchmark.h>

#include "shearmix/mixing.hpp"
#include "shearmix/observable.hpp"

using namespace shearmix;

static void BM_Advect(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sched = sample_schedule(1, 10, 10.0);
    const auto u0 = Observable::sine_q(2.0);
    const auto model = pierrehumbert();
    for (auto _ : state) benchmark::DoNotOptimize(advect(u0, sched, 10, n, model).values.data());
}
BENCHMARK(BM_Advect)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_BallMeans(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto field = advect(Observable::sine_q(2.0), sample_schedule(1, 3, 10.0), 3, n, pierrehumbert());
    const BallMeans balls(n, default_radii(n));
    for (auto _ : state) benchmark::DoNotOptimize(balls.max_abs_means(field));
}
BENCHMARK(BM_BallMeans)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
