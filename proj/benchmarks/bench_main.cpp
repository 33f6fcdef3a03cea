#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cbfem/assembly.hpp"
#include "cbfem/banded.hpp"
#include "cbfem/config.hpp"
#include "cbfem/fdm.hpp"
#include "cbfem/stepper.hpp"

using namespace cbfem;

static void BM_AssembleP2(benchmark::State& state) {
    const Mesh mesh = build_mesh(-6.0, 2.0, static_cast<int>(state.range(0)), ElementOrder::p2);
    for (auto _ : state) {
        GlobalOperators ops = assemble(mesh);
        benchmark::DoNotOptimize(ops.mass);
    }
}
BENCHMARK(BM_AssembleP2)->Arg(100)->Arg(400)->Arg(1200);

static void BM_BandedSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    BandedMatrix a(n, 2);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            if (j != i) {
                a.at(i, j) = unit(rng);
                row += std::abs(a(i, j));
            }
        }
        a.at(i, i) = row + 1.0;
    }
    std::vector<double> b(n);
    for (auto& v : b) {
        v = unit(rng);
    }
    for (auto _ : state) {
        auto x = solve_banded(a, b);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_BandedSolve)->Arg(199)->Arg(799)->Arg(2399);

static void BM_FullSolveP2(benchmark::State& state) {
    const RunConfig config = default_config();
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = build_mesh(-6.0, 2.0, n, ElementOrder::p2);
    for (auto _ : state) {
        PriceSurface surface = full_solve(mesh, config.contract, config.market, 0.5, n, {});
        benchmark::DoNotOptimize(surface.u);
    }
}
BENCHMARK(BM_FullSolveP2)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_FdmSolve(benchmark::State& state) {
    const RunConfig config = default_config();
    const int n = static_cast<int>(state.range(0));
    const FdmGrid grid = build_fdm_grid(-6.0, 2.0, n);
    for (auto _ : state) {
        PriceSurface surface = fdm_solve(grid, config.contract, config.market, 0.5, n, {});
        benchmark::DoNotOptimize(surface.u);
    }
}
BENCHMARK(BM_FdmSolve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
