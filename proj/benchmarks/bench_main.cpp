#include <benchmark/benchmark.h>

#include <numbers>

#include "driftfit/bessel.hpp"
#include "driftfit/inference.hpp"
#include "driftfit/likelihood.hpp"
#include "driftfit/simulate.hpp"
#include "driftfit/spectral.hpp"

namespace {

using namespace driftfit;

ModelParams full6() {
  ModelParams p;
  p.A = 1.0;
  p.c = 0.1;
  p.omega0 = -0.8 * std::numbers::pi;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  return p;
}

void BM_Periodogram(benchmark::State& state) {
  const auto z = simulate(full6(), static_cast<std::size_t>(state.range(0)), 1.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(periodogram(z));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Periodogram)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_ExpectedPeriodogram(benchmark::State& state) {
  const auto p = full6();
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_periodogram(p, static_cast<std::size_t>(state.range(0)), 1.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExpectedPeriodogram)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_BlurredLoglik(benchmark::State& state) {
  const auto p = full6();
  const auto pg = periodogram(simulate(p, static_cast<std::size_t>(state.range(0)), 1.0, 2));
  Objective obj(pg, FrequencyMask{}, LikelihoodKind::kBlurred);
  for (auto _ : state) benchmark::DoNotOptimize(obj(p));
}
BENCHMARK(BM_BlurredLoglik)->Arg(1000)->Arg(1200)->Arg(4096);

void BM_BesselKXpow(benchmark::State& state) {
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k_xpow(0.4, x));
    x = x < 50.0 ? x * 1.01 : 0.01;
  }
}
BENCHMARK(BM_BesselKXpow);

void BM_FitFull6(benchmark::State& state) {
  const auto p = full6();
  const auto pg = periodogram(simulate(p, static_cast<std::size_t>(state.range(0)), 1.0, 3));
  FrequencyMask m;
  m.cutoff = 1.5 * std::abs(p.omega0);
  for (auto _ : state) benchmark::DoNotOptimize(fit(pg, Variant::kFull6, m, p.omega0));
}
BENCHMARK(BM_FitFull6)->Arg(1200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
