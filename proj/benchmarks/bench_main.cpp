#include <benchmark/benchmark.h>

#include "simmatch/analysis.hpp"
#include "simmatch/config.hpp"
#include "simmatch/online.hpp"
#include "simmatch/spectral.hpp"

using namespace simmatch;

static void BM_SymEig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SeededRng rng(1);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  const SymMatrix m(a);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(m));
}
BENCHMARK(BM_SymEig)->Arg(8)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_NetworkStep(benchmark::State& state) {
  NetworkConfig cfg;
  cfg.n = 64;
  cfg.k = static_cast<int>(state.range(0));
  cfg.alpha = 2.0;
  cfg.init_seed = 2;
  StreamGenerator gen(stationary_config(1).stream);
  const auto samples = gen.take(1024);
  Network net(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.step(samples[i++ % samples.size()].x));
  }
}
BENCHMARK(BM_NetworkStep)->Arg(4)->Arg(16);

static void BM_FractionCurve(benchmark::State& state) {
  const auto pairs = gapped_pairs(signal_noise_grid(0.01));
  const auto kind = static_cast<RegularizerKind>(state.range(0));
  const std::vector<double> alphas = {0.01, 0.1, 0.5, 1.0, 10.0, 100.0};
  for (auto _ : state) benchmark::DoNotOptimize(fraction_curve(kind, pairs, 1, 1, alphas));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size() * alphas.size()));
}
BENCHMARK(BM_FractionCurve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
