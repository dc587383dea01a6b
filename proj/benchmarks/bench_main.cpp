#include <benchmark/benchmark.h>

#include "votermix/analysis.hpp"
#include "votermix/chain.hpp"
#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"
#include "votermix/star.hpp"

using namespace votermix;

static void BM_ExactEvolveCycle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ConfigGenerator gen(build_cycle(n));
    ProbabilityVector start = ProbabilityVector::delta(gen.n_states(), gen.n_states() - 1);
    for (auto _ : state) {
        ProbabilityVector out = evolve(gen, start, 1.0);
        benchmark::DoNotOptimize(out.values.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactEvolveCycle)->Arg(8)->Arg(10)->Arg(12)->Complexity();

static void BM_ReducedStarEvolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SparseGenerator gen = reduced_star_generator(n);
    ProbabilityVector start = ProbabilityVector::delta(gen.n_states(), reduced_star_index(n, 1, n));
    for (auto _ : state) {
        ProbabilityVector out = reduced_evolve(gen, start, 1.0);
        benchmark::DoNotOptimize(out.values.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReducedStarEvolve)->Arg(100)->Arg(1000)->Arg(10000)->Complexity();

static void BM_ReducedStarStationary(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SparseGenerator gen = reduced_star_generator(n);
    for (auto _ : state) {
        ProbabilityVector pi = reduced_stationary(gen, n);
        benchmark::DoNotOptimize(pi.values.data());
    }
}
BENCHMARK(BM_ReducedStarStationary)->Arg(1000)->Arg(10000);

static void BM_ForwardRunCycle(benchmark::State& state) {
    const RateKernel kernel = build_cycle(static_cast<int>(state.range(0)));
    const SpinConfiguration ones = SpinConfiguration::all_ones(kernel.n_sites);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward_sample(kernel, ones, 2.0, seed++));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardRunCycle)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_GillespieStar(benchmark::State& state) {
    const RateKernel kernel = build_star(static_cast<int>(state.range(0)));
    const SpinConfiguration ones = SpinConfiguration::all_ones(kernel.n_sites);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gillespie_run(kernel, ones, 1.0, seed++));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GillespieStar)->Arg(100)->Arg(1000)->Arg(10000)->Complexity();

static void BM_PerfectSample(benchmark::State& state) {
    const RateKernel kernel = build_star(static_cast<int>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(perfect_stationary_sample(kernel, seed++));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PerfectSample)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_HypercubeTv(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const double t = 0.5 * std::log(static_cast<double>(n)) + 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hypercube_tv_exact(n, t));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HypercubeTv)->Arg(1000)->Arg(10000)->Arg(100000)->Complexity();

BENCHMARK_MAIN();
