#include <benchmark/benchmark.h>

#include "rough/error_metrics.hpp"
#include "rough/fbm.hpp"
#include "rough/kernel.hpp"
#include "rough/quadrature.hpp"
#include "rough/rheston.hpp"

using namespace rough;

static void BM_GaussRule(benchmark::State& state) {
  const auto w = WeightFunction::fractional(0.1);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss_rule(w, 1.0, 1.6, m));
  }
}
BENCHMARK(BM_GaussRule)->Arg(1)->Arg(4)->Arg(10);

static void BM_LearnedRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(learned_rule(0.1, n, 1.0));
  }
}
BENCHMARK(BM_LearnedRule)->Arg(16)->Arg(1024);

static void BM_L2ErrorExact(benchmark::State& state) {
  const auto r = learned_rule(0.1, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l2_error_exact(r, 1.0));
  }
}
BENCHMARK(BM_L2ErrorExact)->Arg(16)->Arg(256)->Arg(1024);

static void BM_L2ErrorNumeric(benchmark::State& state) {
  const auto r = learned_rule(0.1, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l2_error_numeric(r, 1.0));
  }
}
BENCHMARK(BM_L2ErrorNumeric)->Arg(16)->Arg(256);

static void BM_FbmPaths(benchmark::State& state) {
  const auto r = learned_rule(0.1, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_fbm_paths(r, 1.0, 64, 1000, 1));
  }
  state.SetItemsProcessed(state.iterations() * 64 * 1000);
}
BENCHMARK(BM_FbmPaths)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PsiFractionalAdams(benchmark::State& state) {
  const RHestonParams p;
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_fractional_adams(p, cplx(2.0, -5.0), 1.0, steps));
  }
}
BENCHMARK(BM_PsiFractionalAdams)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_PsiMarkovian(benchmark::State& state) {
  const RHestonParams p;
  const auto r = learned_rule(p.hurst, static_cast<int>(state.range(0)), p.maturity);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_markovian_exp_pc(p, r, cplx(2.0, -5.0), 1.0, 500));
  }
}
BENCHMARK(BM_PsiMarkovian)->Arg(1)->Arg(16)->Arg(1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
