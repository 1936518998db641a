#include <benchmark/benchmark.h>

#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

using namespace warplab;

namespace {

spectral::SturmLiouvilleProblem sphere_problem(std::size_t points, double gamma) {
    auto metric = geometry::round_sphere(3, points);
    auto ric = geometry::RadialField(geometry::curvature_profile(metric).ric_min);
    return {std::move(metric), gamma, std::move(ric)};
}

}  // namespace

// Three nested levels (the default) on the unit S^3 with V = Ric.
static void BM_PrincipalEigenvalue(benchmark::State& state) {
    const auto problem = sphere_problem(static_cast<std::size_t>(state.range(0)), 1.0);
    for (auto _ : state) {
        auto res = spectral::principal_eigenvalue(problem);
        benchmark::DoNotOptimize(res.lambda1);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PrincipalEigenvalue)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_SingleLevel(benchmark::State& state) {
    const auto problem = sphere_problem(static_cast<std::size_t>(state.range(0)), 1.0);
    spectral::SolveOptions opts;
    opts.levels = 1;
    for (auto _ : state) {
        auto res = spectral::principal_eigenvalue(problem, opts);
        benchmark::DoNotOptimize(res.lambda1);
    }
}
BENCHMARK(BM_SingleLevel)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_VerifyCondition(benchmark::State& state) {
    const auto metric = geometry::round_sphere(4, static_cast<std::size_t>(state.range(0)));
    const auto u = geometry::RadialField::constant(metric, 1.0, geometry::FieldKind::Weight);
    for (auto _ : state) {
        auto check = spectral::verify_spectral_condition(metric, u, 1.0, 1.0);
        benchmark::DoNotOptimize(check.worst_residual);
    }
}
BENCHMARK(BM_VerifyCondition)->Arg(4096)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
