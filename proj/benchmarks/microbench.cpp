// Microbenchmarks for the hot paths: covariance/eigendecomposition,
// per-sample streaming steps, and full FOBI separation.
#include <benchmark/benchmark.h>

#include <random>

#include "smica/baselines.hpp"
#include "smica/data.hpp"
#include "smica/fobi.hpp"
#include "smica/linalg.hpp"
#include "smica/online.hpp"

using namespace smica;

namespace {

Matrix random_gaussian(Index d, long t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, t);
    for (Index i = 0; i < d; ++i)
        for (long j = 0; j < t; ++j) m(i, j) = n(rng);
    return m;
}

void bm_sample_covariance(benchmark::State& state) {
    SignalMatrix x(random_gaussian(state.range(0), 10000, 1));
    for (auto _ : state) benchmark::DoNotOptimize(sample_covariance(x));
}

void bm_sym_eig(benchmark::State& state) {
    const Index d = state.range(0);
    Matrix a = random_gaussian(d, d, 2);
    Matrix c = a * a.transpose();
    for (auto _ : state) benchmark::DoNotOptimize(sym_eig(c));
}

void bm_whiten(benchmark::State& state) {
    SignalMatrix x(random_gaussian(state.range(0), 10000, 3));
    WhiteningTransform w = inv_sqrt(sample_covariance(x));
    for (auto _ : state) benchmark::DoNotOptimize(whiten(x, w));
}

void bm_fobi_separate(benchmark::State& state) {
    std::vector<SourceSpec> specs = {{SourceKind::Sine, {}}, {SourceKind::Laplace, {}}};
    SignalMatrix x = mix(gen_sources(specs, state.range(0), 4), reference_mixing_2x2());
    for (auto _ : state) benchmark::DoNotOptimize(fobi_separate(x));
}

void bm_step_online(benchmark::State& state, DynamicsConfig::Mode mode) {
    const Index d = state.range(0);
    SmicaState s = SmicaState::init(d, default_lambda(d), 2e-5, 1.5, 5);
    Matrix xs = random_gaussian(d, 1024, 6);
    DynamicsConfig cfg;
    cfg.mode = mode;
    long t = 0;
    for (auto _ : state) {
        auto [next, step] = step_online(s, xs.col(t++ & 1023), cfg);
        s = std::move(next);
        benchmark::DoNotOptimize(step.y);
    }
}

void bm_step_online_exact(benchmark::State& state) {
    bm_step_online(state, DynamicsConfig::Mode::ExactSolve);
}

void bm_step_online_euler(benchmark::State& state) {
    bm_step_online(state, DynamicsConfig::Mode::EulerIterate);
}

void bm_baseline_step(benchmark::State& state) {
    BaselineConfig cfg;
    cfg.algorithm = static_cast<BaselineAlgorithm>(state.range(1));
    BaselineLearner learner(cfg, state.range(0));
    Matrix xs = random_gaussian(state.range(0), 1024, 7);
    long t = 0;
    for (auto _ : state) benchmark::DoNotOptimize(learner.step(xs.col(t++ & 1023)));
}

void bm_offline_step(benchmark::State& state) {
    DatasetBundle b = scenario(1, state.range(0), 8);
    SmicaState s = SmicaState::init(3, default_lambda(3), 5e-3, 0.75, 9);
    for (auto _ : state) {
        s = offline_step(s, b.stream);
        benchmark::DoNotOptimize(s.W);
    }
}

BENCHMARK(bm_sample_covariance)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bm_sym_eig)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(bm_whiten)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bm_fobi_separate)->Arg(10000)->Arg(50000);
BENCHMARK(bm_step_online_exact)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bm_step_online_euler)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bm_baseline_step)->Args({3, 0})->Args({3, 1})->Args({3, 2})->Args({3, 3})->Args({3, 4});
BENCHMARK(bm_offline_step)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
