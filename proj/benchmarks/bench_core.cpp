#include <benchmark/benchmark.h>

#include <random>

#include "chernoff/function1d.hpp"
#include "chernoff/matrix_semigroup.hpp"
#include "chernoff/parabolic.hpp"

namespace {

chernoff::Matrix random_matrix(int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    chernoff::Matrix M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = u(rng);
    return M;
}

void BM_Expm(benchmark::State& state) {
    chernoff::Matrix L = random_matrix(int(state.range(0)), 42);
    for (auto _ : state)
        benchmark::DoNotOptimize(chernoff::expm(L, 1.0));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(64);

void BM_OperatorNorm(benchmark::State& state) {
    chernoff::Matrix M = random_matrix(int(state.range(0)), 43);
    for (auto _ : state)
        benchmark::DoNotOptimize(chernoff::operator_norm(M));
}
BENCHMARK(BM_OperatorNorm)->Arg(4)->Arg(16)->Arg(64);

void BM_ParabolicStep(benchmark::State& state) {
    chernoff::ParabolicCoefficients coeffs{
        chernoff::rational_bump(1.0, 0.5), chernoff::constant(0.1),
        chernoff::constant(0.0), chernoff::Interval{-12.0, 12.0}};
    chernoff::GridFunction f = chernoff::GridFunction::sample(
        chernoff::gaussian_bump(), chernoff::Interval{-12.0, 12.0},
        24.0 / double(state.range(0)));
    f.extension_margin = 6.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(chernoff::apply_chernoff_step(coeffs, f, 1e-2));
}
BENCHMARK(BM_ParabolicStep)->Arg(512)->Arg(2048)->Arg(8192);

void BM_NumericModulus(benchmark::State& state) {
    chernoff::Function1D f = chernoff::sine(1.0, 2.0);
    f.analytic_modulus.reset();
    chernoff::Interval dom{-4.0, 4.0};
    double x = 0.37;
    for (auto _ : state)
        benchmark::DoNotOptimize(chernoff::modulus_of_continuity(f, x, dom));
}
BENCHMARK(BM_NumericModulus);

}  // namespace

BENCHMARK_MAIN();
