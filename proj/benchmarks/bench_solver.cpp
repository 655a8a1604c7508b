#include <benchmark/benchmark.h>

#include "funreg/estimator.hpp"
#include "funreg/simulate.hpp"
#include "funreg/tuning.hpp"

using namespace funreg;

namespace {

SimulatedData data_for(int n, int subjects, int p)
{
    return simulate({ScenarioKind::exponential, 5, 1.0, p, 7}, n, n, subjects);
}

void bm_gram(benchmark::State& state)
{
    const auto grid = equispaced_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(KernelSpec{}, grid.points()));
}
BENCHMARK(bm_gram)->Arg(5)->Arg(20)->Arg(100);

void bm_precompute(benchmark::State& state)
{
    const auto sim = data_for(static_cast<int>(state.range(0)), 100, 3);
    for (auto _ : state) benchmark::DoNotOptimize(precompute(sim.data, KernelSpec{}));
}
BENCHMARK(bm_precompute)->Arg(5)->Arg(20)->Arg(50);

void bm_update_r(benchmark::State& state)
{
    const auto sim = data_for(static_cast<int>(state.range(0)), 100, 3);
    const SolverWorkspace ws = precompute(sim.data, KernelSpec{});
    const Matrix b = Matrix::Zero(ws.n2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(update_r(ws, b, 1e-3));
}
BENCHMARK(bm_update_r)->Arg(5)->Arg(20)->Arg(50);

void bm_fit_mixed(benchmark::State& state)
{
    const auto sim = data_for(static_cast<int>(state.range(0)), 100, 3);
    const SolverWorkspace ws = precompute(sim.data, KernelSpec{});
    PenaltyConfig cfg{1e-3, 1e-2, 0.1 * lambda3_ceiling(sim.data)};
    for (auto _ : state) benchmark::DoNotOptimize(fit(ws, cfg));
}
BENCHMARK(bm_fit_mixed)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void bm_cv_function_on_function(benchmark::State& state)
{
    const auto sim = data_for(5, 50, 0);
    const CVConfig cv = function_on_function_preset();
    for (auto _ : state) benchmark::DoNotOptimize(cv_select(sim.data, KernelSpec{}, cv));
}
BENCHMARK(bm_cv_function_on_function)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
