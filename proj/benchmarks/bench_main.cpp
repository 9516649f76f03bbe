#include "cubeskel/hopf.hpp"
#include "cubeskel/maps.hpp"
#include "cubeskel/quadrature.hpp"
#include "cubeskel/transport.hpp"

#include <benchmark/benchmark.h>

using namespace cubeskel;

static void BM_EnergyUnitCell(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    SkeletonRetraction u(n);
    const auto box = make_box(Vec::Zero(n), Vec::Ones(n));
    for (auto _ : state) benchmark::DoNotOptimize(energy(u, box, n - 1.0).value);
}
BENCHMARK(BM_EnergyUnitCell)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ExactMin2x2(benchmark::State& state)
{
    const CubicalGrid grid(2, 2);
    const auto s = uniform_supplies(grid, 2);
    for (auto _ : state) benchmark::DoNotOptimize(exact_min(grid, s, 0.5).cost);
}
BENCHMARK(BM_ExactMin2x2)->Unit(benchmark::kMillisecond);

static void BM_DyadicLocal(benchmark::State& state)
{
    const auto ell = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(plan_cost(2, ell, 0.5, 2, Solver::DyadicLocal));
}
BENCHMARK(BM_DyadicLocal)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_HopfWhitehead(benchmark::State& state)
{
    WhiteheadBoundaryMap v(1);
    HopfOptions opts;
    opts.resolution = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(hopf_invariant(v, Vec::Constant(4, -0.5), Vec::Constant(4, 0.5), 0, opts).invariant);
}
BENCHMARK(BM_HopfWhitehead)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
