#include <benchmark/benchmark.h>

#include "mbloch/dynamics.hpp"
#include "mbloch/presets.hpp"
#include "mbloch/random.hpp"

namespace {

using namespace mbloch;

ChainSetup setup(int n, int grid_n) {
  RunConfig cfg;
  cfg.preset = "random_smooth";
  cfg.n = n;
  cfg.seed = 1;
  return make_chain_setup(cfg, PeriodicGrid(grid_n));
}

void BM_Rk4Step(benchmark::State& st) {
  const ChainSetup s = setup(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  StepControl ctl;
  ctl.dt = 1e-3;
  for (auto _ : st) benchmark::DoNotOptimize(rk4_step(s.state, s.params, ctl));
  st.SetItemsProcessed(st.iterations() * st.range(1));
}
BENCHMARK(BM_Rk4Step)->Args({2, 128})->Args({2, 512})->Args({3, 128})->Args({4, 128});

void BM_ChainRhs(benchmark::State& st) {
  const ChainSetup s = setup(static_cast<int>(st.range(0)), 256);
  for (auto _ : st) benchmark::DoNotOptimize(chain_rhs(s.state, s.params, StepControl{}));
}
BENCHMARK(BM_ChainRhs)->Arg(2)->Arg(4);

void BM_ExpAlgebra(benchmark::State& st) {
  Rng rng(2);
  const AlgebraElement x = random_algebra(rng, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(exp_algebra(x));
}
BENCHMARK(BM_ExpAlgebra)->DenseRange(2, 4);

void BM_Reunitarize(benchmark::State& st) {
  Rng rng(3);
  const int n = static_cast<int>(st.range(0));
  const Matrix a = random_group(rng, n).matrix() + 1e-6 * random_algebra(rng, n).matrix();
  for (auto _ : st) benchmark::DoNotOptimize(reunitarize(a));
}
BENCHMARK(BM_Reunitarize)->DenseRange(2, 4);

void BM_Diagonalize(benchmark::State& st) {
  Rng rng(4);
  const AlgebraElement rho = random_algebra(rng, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(diagonalize_skew(rho));
}
BENCHMARK(BM_Diagonalize)->DenseRange(2, 4);

}  // namespace

BENCHMARK_MAIN();
