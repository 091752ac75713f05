#include <benchmark/benchmark.h>

#include <random>

#include "affine/algebra.hpp"
#include "affine/chain.hpp"
#include "affine/characters.hpp"
#include "affine/diffusion.hpp"
#include "affine/highest_weight.hpp"
#include "affine/rng.hpp"

using namespace affine;

namespace {

const AffineAlgebra& a1() {
  static const AlgebraPtr alg = make_algebra("A1~");
  return *alg;
}

const AffineAlgebra& a2() {
  static const AlgebraPtr alg = make_algebra("A2~");
  return *alg;
}

}  // namespace

static void BM_Freudenthal(benchmark::State& state) {
  const AffineAlgebra& alg = state.range(1) == 1 ? a1() : a2();
  const Weight lambda = alg.lambda0();
  for (auto _ : state) benchmark::DoNotOptimize(freudenthal_table(alg, lambda, state.range(0)).size());
}
BENCHMARK(BM_Freudenthal)->Args({10, 1})->Args({20, 1})->Args({40, 1})->Args({4, 2})->Args({8, 2})
    ->Unit(benchmark::kMillisecond);

static void BM_SeriesOracle(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  for (auto _ : state) benchmark::DoNotOptimize(character_series_oracle(alg, alg.lambda0(), state.range(0)).size());
}
BENCHMARK(BM_SeriesOracle)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_AlternatingSum(benchmark::State& state) {
  const AffineAlgebra& alg = state.range(1) == 1 ? a1() : a2();
  const Specialization s = rho_specialization(alg, state.range(0));
  const Weight big = alg.rho() + alg.fundamental(1);
  for (auto _ : state) benchmark::DoNotOptimize(alternating_sum(alg, big, s).log_abs);
}
BENCHMARK(BM_AlternatingSum)->Args({1, 1})->Args({10, 1})->Args({50, 1})->Args({1, 2})->Args({10, 2});

static void BM_BranchingMult(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  const Weight omega = Rational(2) * alg.lambda0();
  const long n = state.range(0);
  const Weight beta = alg.lambda0() + Rational(n) * omega - alg.alpha(0) - alg.delta();
  const MultiplicityTable tp = tensor_power_table(alg, omega, n, 8);
  for (auto _ : state) benchmark::DoNotOptimize(branching_mult(alg, tp, alg.lambda0(), omega, n, beta));
}
BENCHMARK(BM_BranchingMult)->Arg(1)->Arg(2)->Arg(5);

// cold rows: a new kernel per iteration, so memoization does not hide the cost
static void BM_BarredKernelRow(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  const long n = state.range(0);
  const Specialization s = rho_specialization(alg, n);
  const Weight omega = Rational(2) * alg.lambda0();
  const Weight lambda = alg.from_pairings({n, n});
  for (auto _ : state) {
    state.PauseTiming();
    BarredKernel kernel(alg, omega, s);
    state.ResumeTiming();
    benchmark::DoNotOptimize(kernel.row(lambda).entries.size());
  }
}
BENCHMARK(BM_BarredKernelRow)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_ChainStep(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  const Specialization s = rho_specialization(alg, 100);
  const BarredKernel kernel(alg, Rational(2) * alg.lambda0(), s);
  Weight x = alg.from_pairings({100, 100});
  std::mt19937_64 g = make_stream(1, 0);
  for (auto _ : state) x = kernel.step(x, g);
  benchmark::DoNotOptimize(x);
}
BENCHMARK(BM_ChainStep);

static void BM_Survival(benchmark::State& state) {
  const AffineAlgebra& alg = state.range(0) == 1 ? a1() : a2();
  const SpaceTime st(alg);
  const SpaceTimePoint x = st.from_weight(alg.rho());
  for (auto _ : state) benchmark::DoNotOptimize(st.survival(x).value);
}
BENCHMARK(BM_Survival)->Arg(1)->Arg(2);

static void BM_SurvivalGradient(benchmark::State& state) {
  const AffineAlgebra& alg = state.range(0) == 1 ? a1() : a2();
  const SpaceTime st(alg);
  const SpaceTimePoint x = st.from_weight(alg.rho());
  for (auto _ : state) benchmark::DoNotOptimize(st.survival_gradient(x).ds);
}
BENCHMARK(BM_SurvivalGradient)->Arg(1)->Arg(2);

static void BM_ReflectedDensity(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  const SpaceTime st(alg);
  const SpaceTimePoint x = st.from_weight(alg.rho());
  SpaceTimePoint y = x;
  y.s += 2.0;
  y.z[0] += 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(st.reflected_density(x, y, 1.0, DensityMode::drifted_by_x).value);
}
BENCHMARK(BM_ReflectedDensity);

// one conditioned path of 1000 Euler steps
static void BM_ConditionedPath(benchmark::State& state) {
  const AffineAlgebra& alg = a1();
  const SpaceTime st(alg);
  SampleOptions opt;
  opt.t_max = 1;
  opt.dt = 1e-3;
  opt.n_paths = 1;
  opt.conditioned = true;
  opt.keep_points = false;
  opt.record_steps = {1000};
  const SpaceTimePoint x = st.from_weight(alg.rho());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    opt.seed = ++seed;
    benchmark::DoNotOptimize(sample_paths(st, x, opt).paths.size());
  }
}
BENCHMARK(BM_ConditionedPath)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
