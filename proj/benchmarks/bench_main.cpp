#include "sojourn/analytic.hpp"
#include "sojourn/experiments.hpp"
#include "sojourn/simulate.hpp"
#include "sojourn/stable.hpp"
#include "sojourn/transforms.hpp"

#include <benchmark/benchmark.h>

using namespace sojourn;

namespace {

const ModelParams p22(2, 2.0);

void BM_SurvivalSeries(benchmark::State& state) {
    const SurvivalSeries series(p22);
    double t = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(series.survival(t));
        t = t < 1e6 ? t * 1.1 : 0.1;
    }
}
BENCHMARK(BM_SurvivalSeries);

void BM_FirstReturnDensity(benchmark::State& state) {
    const SurvivalSeries series(p22);
    const auto method = InversionMethod::talbot(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(first_return_density(10.0, series, method).value);
}
BENCHMARK(BM_FirstReturnDensity)->Arg(16)->Arg(24)->Arg(32);

void BM_SojournCdf(benchmark::State& state) {
    const SurvivalSeries series(p22);
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sojourn_cdf_report(0.4 * t, t, series).value);
}
BENCHMARK(BM_SojournCdf)->Arg(1)->Arg(10)->Arg(100);

void BM_StableDensity(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(stable_density_series(2.0, 0.5));
        benchmark::DoNotOptimize(stable_density_quadrature(2.0, 0.5));
    }
}
BENCHMARK(BM_StableDensity);

void BM_StableCdf(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(stable_cdf(3.0, 0.5));
}
BENCHMARK(BM_StableCdf);

void BM_SamplePath(benchmark::State& state) {
    const NormChainGenerator gen(p22);
    const double horizon = static_cast<double>(state.range(0));
    std::uint64_t index = 0;
    for (auto _ : state) {
        const auto path = sample_path(gen, horizon, 1, index++);
        benchmark::DoNotOptimize(functionals(path, horizon).sojourn);
    }
}
BENCHMARK(BM_SamplePath)->Arg(10)->Arg(1000)->Arg(100000);

void BM_SojournProfile(benchmark::State& state) {
    const NormChainGenerator gen(p22);
    const auto times = log_grid(1e2, 1e5, 10);
    std::uint64_t index = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sojourn_profile(gen, times, 1, index++));
}
BENCHMARK(BM_SojournProfile);

}  // namespace

BENCHMARK_MAIN();
