// Micro-benchmarks for the sampling kernels and estimator hot paths.
#include <benchmark/benchmark.h>

#include "fkpde/brownian.hpp"
#include "fkpde/builtin.hpp"
#include "fkpde/debias.hpp"
#include "fkpde/euler.hpp"
#include "fkpde/lea.hpp"
#include "fkpde/series.hpp"

using namespace fkpde;

static void BM_FptSample(benchmark::State& state) {
    RngStream rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(series::sample_fpt_unit(rng));
}
BENCHMARK(BM_FptSample);

static void BM_TerminalReveal(benchmark::State& state) {
    RngStream rng(2, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_terminal_below_barrier(1.0, 2.0, 1.0, +1, rng));
}
BENCHMARK(BM_TerminalReveal);

static void BM_Skeleton1d(benchmark::State& state) {
    const PdeProblem pb = make_adv_diff_1d(0.01, state.range(0) / 10.0);
    const EaProblem ea = make_ea(pb, {0.9}, 5.0);
    RngStream rng(3, 0);
    std::uint64_t segments = 0;
    for (auto _ : state) {
        Skeleton sk = simulate_skeleton(ea, rng);
        segments += sk.segments_proposed;
        benchmark::DoNotOptimize(sk.t_hat);
    }
    state.counters["segments/path"] =
        static_cast<double>(segments) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_Skeleton1d)->Arg(1)->Arg(4);

static void BM_Skeleton2d(benchmark::State& state) {
    const PdeProblem pb = make_poisson_drift_2d();
    const EaProblem ea = make_ea(pb, {0.2, 0.2}, 2.0);
    RngStream rng(4, 0);
    for (auto _ : state) {
        Skeleton sk = simulate_skeleton(ea, rng);
        benchmark::DoNotOptimize(sk.terminal[0]);
    }
}
BENCHMARK(BM_Skeleton2d);

static void BM_EulerPath(benchmark::State& state) {
    const PdeProblem pb = make_poisson_drift_2d();
    RngStream rng(5, 0);
    std::uint64_t steps = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(euler_path_value(pb, {0.2, 0.2}, 2.0, state.range(0), rng, steps));
}
BENCHMARK(BM_EulerPath)->Arg(128)->Arg(2048);

static void BM_LadderDraw(benchmark::State& state) {
    const PdeProblem pb = make_adv_diff_1d(0.01, 0.1);
    const auto halting = HaltingDistribution::geometric(0.45);
    RngStream rng(6, 0);
    for (auto _ : state) {
        LadderDraw d = sample_ladder(pb, {0.9}, 5.0, halting, rng);
        benchmark::DoNotOptimize(d.value);
    }
}
BENCHMARK(BM_LadderDraw);

BENCHMARK_MAIN();
