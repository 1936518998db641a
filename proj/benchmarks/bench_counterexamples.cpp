#include <benchmark/benchmark.h>

#include "warplab/counterexamples.hpp"
#include "warplab/profile.hpp"

using namespace warplab;

static void BM_FindDelta(benchmark::State& state) {
    counterexamples::LargeDiameterParams p;
    const auto ab = counterexamples::solve_coupling_constants(p.n, p.gamma);
    for (auto _ : state) {
        auto d = counterexamples::find_delta(p, ab);
        benchmark::DoNotOptimize(d.delta);
    }
}
BENCHMARK(BM_FindDelta)->Unit(benchmark::kMillisecond);

static void BM_LargeDiameter(benchmark::State& state) {
    counterexamples::LargeDiameterParams p;
    p.grid = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto rep = counterexamples::build_large_diameter_metric(p);
        benchmark::DoNotOptimize(rep.diameter);
    }
}
BENCHMARK(BM_LargeDiameter)->Arg(2049)->Arg(8193)->Unit(benchmark::kMillisecond);

static void BM_Supercritical(benchmark::State& state) {
    counterexamples::SupercriticalParams p;
    p.grid = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto rep = counterexamples::build_supercritical_example(p);
        benchmark::DoNotOptimize(rep.lambda1.lambda1);
    }
}
BENCHMARK(BM_Supercritical)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);

// Profile checks sit downstream of every construction.
static void BM_ComparisonVerdict(benchmark::State& state) {
    const profile::ModelProfile model(4.0 * 3.141592653589793, 1.0, 3);
    const auto curve = model.sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto v = profile::comparison_verdict(curve);
        benchmark::DoNotOptimize(v.worst_residual);
    }
}
BENCHMARK(BM_ComparisonVerdict)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
