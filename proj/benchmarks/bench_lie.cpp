#include <benchmark/benchmark.h>

#include "shearmix/lie.hpp"

using namespace shearmix;

static void BM_BracketDepth2(benchmark::State& state) {
    const auto model = pierrehumbert();
    const auto a = BracketWord::field(1);
    const auto b = BracketWord::parse("[X1,X2]");
    Eigen::VectorXd x(4);
    x << 1.0, 0.5, 0.3, 0.9;
    for (auto _ : state) benchmark::DoNotOptimize(bracket(FieldFamily::lifted, model, a, b, x));
}
BENCHMARK(BM_BracketDepth2);

static void BM_ReferenceCertificates(benchmark::State& state) {
    const auto cases = reference_cases();
    for (auto _ : state) {
        for (const auto& rc : cases) {
            std::vector<BracketWord> cols;
            for (const auto& s : rc.columns) cols.push_back(BracketWord::parse(s));
            benchmark::DoNotOptimize(rank_certificate(rc.family, rc.model, rc.point, cols).det);
        }
    }
}
BENCHMARK(BM_ReferenceCertificates);

BENCHMARK_MAIN();
