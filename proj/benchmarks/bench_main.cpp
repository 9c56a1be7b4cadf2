#include <benchmark/benchmark.h>

#include <random>

#include "jitterkit/correlation.hpp"
#include "jitterkit/fitting.hpp"
#include "jitterkit/models.hpp"
#include "jitterkit/phasematch.hpp"
#include "jitterkit/simulator.hpp"

using namespace jitterkit;

namespace {

SimOutput pair_streams(double pair_rate_hz, double dark_rate_hz) {
  SimConfig cfg;
  cfg.pair_rate_hz = pair_rate_hz;
  cfg.duration_s = 1.0;
  cfg.a.response = Gaussian{0.0, 16.7};
  cfg.b.response = Gaussian{0.0, 16.7};
  cfg.a.dark_rate_hz = dark_rate_hz;
  cfg.b.dark_rate_hz = dark_rate_hz;
  cfg.seed = 1;
  return simulate(cfg);
}

void BM_CrossCorrelation(benchmark::State& state) {
  const auto sim = pair_streams(1e5, static_cast<double>(state.range(0)));
  const unsigned threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto h = cross_correlation(sim.a, sim.b, {-20000, 20000, 2}, threads);
    benchmark::DoNotOptimize(h.counts.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(sim.a.tags.size() + sim.b.tags.size()));
}
BENCHMARK(BM_CrossCorrelation)
    ->Args({0, 1})
    ->Args({1000000, 1})
    ->Args({1000000, 4})
    ->Unit(benchmark::kMillisecond);

void BM_EvaluateGaussExp(benchmark::State& state) {
  const ResponseModel m = GaussExpTail{0.5, 0.0025, 0.0, 80.0, 200.0};
  std::vector<double> xs(1024);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-500.0, 3000.0);
  for (auto& x : xs) x = u(rng);
  for (auto _ : state) {
    double s = 0.0;
    for (double x : xs) s += evaluate(m, x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_EvaluateGaussExp);

void BM_FitHistogram(benchmark::State& state) {
  const auto family = static_cast<ModelFamily>(state.range(0));
  SimConfig cfg;
  cfg.pair_rate_hz = 1e5;
  cfg.duration_s = 1.0;
  cfg.a.response = GaussExpTail{0.5, 0.0025, 0.0, 80.0, 200.0};
  cfg.b.response = Gaussian{0.0, 17.0};
  cfg.a.dark_rate_hz = 1e6;
  cfg.b.dark_rate_hz = 1e6;
  cfg.seed = 3;
  const auto sim = simulate(cfg);
  const auto h = cross_correlation(sim.a, sim.b, {-1000, 3000, 8});
  for (auto _ : state) {
    auto fit = fit_histogram(h, family, 17.0);
    benchmark::DoNotOptimize(fit.chi2);
  }
}
BENCHMARK(BM_FitHistogram)
    ->Arg(static_cast<int>(ModelFamily::Gaussian))
    ->Arg(static_cast<int>(ModelFamily::GaussExpTail))
    ->Unit(benchmark::kMillisecond);

void BM_SolveSignal(benchmark::State& state) {
  const auto g = default_geometry();
  double theta = 12.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_signal_wavelength(g, theta));
    theta = theta >= 26.7 ? 12.7 : theta + 0.1;
  }
}
BENCHMARK(BM_SolveSignal);

}  // namespace

BENCHMARK_MAIN();
