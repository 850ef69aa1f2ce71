#include <benchmark/benchmark.h>

#include "pnbounds/analyze.hpp"
#include "pnbounds/intervals.hpp"
#include "pnbounds/simulation.hpp"

namespace {

void BM_NormalQuantile(benchmark::State& state) {
  double u = 0.0001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnb::normal_quantile(u));
    u += 0.0001;
    if (u >= 1.0) u = 0.0001;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_CriticalValue(benchmark::State& state) {
  double gap = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnb::im_critical_value(0.2, 0.2 + gap, 1.3, 1.1, 2000, 0.05));
    gap = gap < 0.5 ? gap + 0.001 : 0.0;
  }
}
BENCHMARK(BM_CriticalValue);

void BM_DgpSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  pnb::Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnb::dgp_sample(n, 0.5, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_DgpSample)->Arg(500)->Arg(2000);

void BM_LogisticFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  pnb::Rng rng(2);
  const pnb::Dataset data = pnb::dgp_sample(n, 0.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pnb::fit_outcome_model(data, pnb::LearnerKind::LogisticInteraction));
  }
}
BENCHMARK(BM_LogisticFit)->Arg(500)->Arg(2000)->Arg(8000);

void BM_CrossfitBounds(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  pnb::Rng rng(3);
  const pnb::Dataset data = pnb::dgp_sample(n, 0.0, rng);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pnb::crossfit_bounds(data, 5, pnb::LearnerKind::LogisticInteraction, ++seed));
  }
}
BENCHMARK(BM_CrossfitBounds)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LocalAverageCrossfit(benchmark::State& state) {
  pnb::Rng rng(4);
  const pnb::Dataset data = pnb::dgp_sample(233, 0.0, rng);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pnb::crossfit_bounds(data, 4, pnb::LearnerKind::LocalAverage, ++seed));
  }
  state.SetLabel("licorice-sized");
}
BENCHMARK(BM_LocalAverageCrossfit)->Unit(benchmark::kMillisecond);

void BM_OracleQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnb::dgp_moments_quadrature(201));
  }
}
BENCHMARK(BM_OracleQuadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
