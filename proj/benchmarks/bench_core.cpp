#include <benchmark/benchmark.h>

#include <complex>

#include "implab/fatou.hpp"
#include "implab/germ.hpp"
#include "implab/implosion.hpp"
#include "implab/julia.hpp"
#include "implab/orbit.hpp"
#include "implab/schedule.hpp"

using namespace implab;
using C = std::complex<double>;

static void BM_GermEvalQuadratic(benchmark::State& state) {
    const Germ g = Germ::polynomial({1.0});
    C w(-0.3, 0.05);
    for (auto _ : state) {
        w = g.eval_unchecked(w);
        benchmark::DoNotOptimize(w);
        if (std::abs(w) < 1e-6) w = C(-0.3, 0.05);
    }
}
BENCHMARK(BM_GermEvalQuadratic);

static void BM_GermEvalGeometric30(benchmark::State& state) {
    const Germ g = Germ::geometric(30);
    C w(-0.3, 0.05);
    for (auto _ : state) {
        w = g.eval_unchecked(w);
        benchmark::DoNotOptimize(w);
        if (std::abs(w) < 1e-6) w = C(-0.3, 0.05);
    }
}
BENCHMARK(BM_GermEvalGeometric30);

static void BM_NonautonomousOrbit(benchmark::State& state) {
    const Germ g = Germ::polynomial({1.0});
    const auto s = SigmaSchedule::constant(0.5);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto tr = nonautonomous_orbit<double>(g, C(-0.5), s, n);
        benchmark::DoNotOptimize(tr.points.back());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_NonautonomousOrbit)->Arg(1000)->Arg(10000);

static void BM_AttractingCoord(benchmark::State& state) {
    const FatouEngine<double> eng(Germ::polynomial({1.0}), 1e-9);
    for (auto _ : state) benchmark::DoNotOptimize(eng.attracting_coord(C(-0.5)));
}
BENCHMARK(BM_AttractingCoord);

static void BM_RepellingInverse(benchmark::State& state) {
    const FatouEngine<double> eng(Germ::polynomial({1.0}), 1e-9);
    for (auto _ : state) benchmark::DoNotOptimize(eng.repelling_inverse(C(-5.0)));
}
BENCHMARK(BM_RepellingInverse);

static void BM_Lavaurs(benchmark::State& state) {
    const FatouEngine<double> eng(Germ::polynomial({1.0}), 1e-9);
    for (auto _ : state) benchmark::DoNotOptimize(eng.lavaurs(C(-0.5), C(0.5)));
}
BENCHMARK(BM_Lavaurs);

static void BM_Phase(benchmark::State& state) {
    const auto s = SigmaSchedule::random_disk({0.2, 0.0}, 0.5, 7);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(s.phase(n).u_n);
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Phase)->Arg(10000)->Arg(100000);

static void BM_PsiReading(benchmark::State& state) {
    const auto fr = make_frame<double>(Germ::polynomial({1.0}), 10000, 0.6);
    C w(-0.003, 0.0001);
    for (auto _ : state) benchmark::DoNotOptimize(phi_coord(fr, w));
}
BENCHMARK(BM_PsiReading);

static void BM_RunImplosion(benchmark::State& state) {
    const Germ g = Germ::polynomial({1.0});
    const auto s = SigmaSchedule::constant(0.5);
    RunOptions opts;
    opts.diagnose = state.range(1) != 0;
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto rep = run_implosion(g, s, C(-0.5), n, opts);
        benchmark::DoNotOptimize(rep.error);
    }
}
BENCHMARK(BM_RunImplosion)->Args({1000, 0})->Args({1000, 1})->Args({10000, 0});

static void BM_BasinRenderRow(benchmark::State& state) {
    const Germ g = Germ::polynomial({1.0});
    const GridSpec grid{{-0.5, 0.0}, 3.0, 3.0, 256, 1};
    for (auto _ : state) {
        auto bm = render_basin(g, grid, 256, 0.25, /*threads=*/1);
        benchmark::DoNotOptimize(bm.labels.data());
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_BasinRenderRow);

BENCHMARK_MAIN();
