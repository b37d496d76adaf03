#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "seedscope/alpha_estimator.hpp"
#include "seedscope/ecdf.hpp"
#include "seedscope/rng.hpp"
#include "seedscope/synth.hpp"
#include "seedscope/trimming.hpp"

using namespace seedscope;

namespace {

std::vector<double> normal_sample(std::uint64_t index, std::size_t n, double shift) {
  RandomStream rng(11, StreamDomain::synth, index);
  std::vector<double> out(n);
  for (auto& x : out) x = shift + rng.normal();
  return out;
}

void BM_TrimmedKsSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cand = ecdf_of(normal_sample(1, n, 0.2));
  const auto ref = interpolate(ecdf_of(normal_sample(2, 10 * n, 0.0)));
  for (auto _ : state) {
    const TrimmedKs problem(cand, ref);
    benchmark::DoNotOptimize(problem.statistic(0.05));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrimmedKsSolve)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_AlphaSweepPrebuilt(benchmark::State& state) {
  const auto cand = ecdf_of(normal_sample(1, 4000, 0.2));
  const auto ref = interpolate(ecdf_of(normal_sample(2, 40000, 0.0)));
  const TrimmedKs problem(cand, ref);
  const auto grid = default_alpha_grid();
  for (auto _ : state) {
    double total = 0.0;
    for (double alpha : grid) total += problem.statistic(alpha);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_AlphaSweepPrebuilt);

void BM_BuildEnvelope(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cand = ecdf_of(normal_sample(1, n, 0.2));
  const auto ref = interpolate(ecdf_of(normal_sample(2, 10 * n, 0.0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_envelope(cand, ref, 0.05).statistic());
}
BENCHMARK(BM_BuildEnvelope)->RangeMultiplier(4)->Range(256, 16384);

void BM_EstimateAlpha(benchmark::State& state) {
  SynthSpec spec = *synth_preset("paper-cnn-analogue");
  spec.n_models = 21;
  const auto pool = generate_pool(spec);
  auto ids = pool.ids();
  const std::string candidate = ids.back();
  ids.pop_back();
  AlphaConfig cfg;
  cfg.n_bootstrap = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_alpha(pool, ids, candidate, cfg).alpha_hat);
  }
}
BENCHMARK(BM_EstimateAlpha)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
