#include <benchmark/benchmark.h>

#include "specmix/correlation.hpp"
#include "specmix/mixed_model.hpp"
#include "specmix/random.hpp"
#include "specmix/simulation.hpp"
#include "specmix/spectral.hpp"
#include "specmix/wavelet.hpp"

using namespace specmix;

namespace {

Vector noise(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

void BM_Dwt(benchmark::State& state) {
  const Vector v = noise(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(dwt(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dwt)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Idwt(benchmark::State& state) {
  const Vector v = noise(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(idwt(v));
}
BENCHMARK(BM_Idwt)->RangeMultiplier(4)->Range(64, 16384);

void BM_LogPeriodogram(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.S = 32;
  cfg.T = state.range(0);
  const SimulatedPanel p = generate_panel(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(log_periodogram(p.series));
}
BENCHMARK(BM_LogPeriodogram)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_GeneratePanel(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.S = 32;
  cfg.T = state.range(0);
  const ScenarioTruth truth = scenario_truth(cfg);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_panel(cfg, truth, ++seed));
}
BENCHMARK(BM_GeneratePanel)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FitIterativeGls(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.S = state.range(0);
  cfg.T = 512;
  const ScenarioTruth truth = scenario_truth(cfg);
  const CoefficientPanel Y = gaussian_sequence_panel(truth, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_iterative_gls(Y, FitConfig{}));
}
BENCHMARK(BM_FitIterativeGls)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NearestCorrelation(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(4);
  Matrix M = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) M(i, j) = M(j, i) = 2.0 * rng.uniform() - 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(nearest_correlation(M));
}
BENCHMARK(BM_NearestCorrelation)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
