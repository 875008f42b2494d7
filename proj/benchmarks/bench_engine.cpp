#include <random>

#include <benchmark/benchmark.h>

#include "thhcalc/fp_linalg.hpp"
#include "thhcalc/hochschild.hpp"
#include "thhcalc/runner.hpp"
#include "thhcalc/scenario.hpp"

using namespace thhcalc;

namespace {

FpMatrix random_matrix(std::size_t n, int p, double density, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> c(1, p - 1);
    FpMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (u(rng) < density)
                m.at(i, j) = static_cast<Fp>(c(rng));
    return m;
}

void BM_RrefDense(benchmark::State& state)
{
    const PrimeField F(5);
    const FpMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 5, 0.5, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(rref_dense(m, F));
}
BENCHMARK(BM_RrefDense)->Arg(64)->Arg(128)->Arg(256);

void BM_RrefSparse(benchmark::State& state)
{
    const PrimeField F(5);
    const FpMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 5, 0.02, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(rref_sparse(m, F));
}
BENCHMARK(BM_RrefSparse)->Arg(64)->Arg(128)->Arg(256);

void BM_BarComplexHH(benchmark::State& state)
{
    const PrimeField F(3);
    const Window W{0, static_cast<int>(state.range(0)), 0};
    const Presentation A(F,
                         {{"v1", {4, 0}, GeneratorKind::Polynomial, 0, {}, 0},
                          {"alpha1", {3, 0}, GeneratorKind::Exterior, 0, {}, 0}},
                         {}, W);
    for (auto _ : state)
        benchmark::DoNotOptimize(hh_dims(A, W, 6, 2));
}
BENCHMARK(BM_BarComplexHH)->Arg(10)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_Scenario(benchmark::State& state, const char* name)
{
    const Scenario s = parse_scenario(read_scenario_file(THHCALC_BENCH_CORPUS, name));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_scenario(s));
}
BENCHMARK_CAPTURE(BM_Scenario, thh_jzeta_mod_p_v1, "thh_jzeta_mod_p_v1")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, thh_j_mod_p_v1, "thh_j_mod_p_v1")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, hh_jzeta_gr, "hh_jzeta_gr")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
