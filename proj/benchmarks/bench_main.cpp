#include "grassclust/egct.hpp"
#include "grassclust/karma.hpp"
#include "grassclust/louvain.hpp"
#include "grassclust/synthgen.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace grassclust;

namespace {

KarmaParams state_params() {
  KarmaParams p;
  p.window_count = 30;
  p.block_rows = 2;
  p.rank = 2;
  p.forward_width = 60;
  p.backward_width = 20;
  return p;
}

const std::vector<Eigen::VectorXd>& d1_snapshots() {
  static const auto v = assemble_state_snapshots(gen_timeseries(preset_states("d1"), 1).series);
  return v;
}

std::vector<GrassmannPoint> d1_features() {
  const auto& v = d1_snapshots();
  const auto p = state_params();
  auto hf = extract_features_over_horizon(v, horizon_anchors(static_cast<long>(v.size()), p), p,
                                          KernelSpec::gaussian(0.8), 1);
  std::vector<GrassmannPoint> out;
  for (auto& f : hf.features) out.push_back(std::move(f.point));
  return out;
}

void BM_GramHankelDirect(benchmark::State& state) {
  const auto& v = d1_snapshots();
  const auto p = state_params();
  const auto k = KernelSpec::gaussian(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(gram_hankel(v, 100, p, k));
}
BENCHMARK(BM_GramHankelDirect)->Unit(benchmark::kMillisecond);

void BM_GramHankelFromTable(benchmark::State& state) {
  const auto& v = d1_snapshots();
  const auto p = state_params();
  const LaggedKernelTable table(v, p, KernelSpec::gaussian(0.8), 1);
  for (auto _ : state) benchmark::DoNotOptimize(table.gram_hankel(100));
}
BENCHMARK(BM_GramHankelFromTable)->Unit(benchmark::kMillisecond);

void BM_HorizonExtraction(benchmark::State& state) {
  const auto& v = d1_snapshots();
  const auto p = state_params();
  const auto anchors = horizon_anchors(static_cast<long>(v.size()), p);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_features_over_horizon(v, anchors, p, KernelSpec::gaussian(0.8), threads));
  }
}
BENCHMARK(BM_HorizonExtraction)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Egct(benchmark::State& state) {
  const auto features = d1_features();
  EgctParams params;
  params.k_nn = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(egct(features, params));
}
BENCHMARK(BM_Egct)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Louvain(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double p = (i * 8 / n == j * 8 / n) ? 0.2 : 0.01;
      if (unit(rng) < p) w(i, j) = w(j, i) = unit(rng);
    }
  }
  const WeightedGraph graph(w);
  for (auto _ : state) benchmark::DoNotOptimize(louvain(graph));
}
BENCHMARK(BM_Louvain)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
