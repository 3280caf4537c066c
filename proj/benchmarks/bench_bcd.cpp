#include <benchmark/benchmark.h>

#include <random>

#include "cruot/bcd.hpp"
#include "cruot/toy.hpp"

namespace {

using namespace cruot;

PointCloud random_cloud(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  Matrix pts(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) pts(i, j) = g(rng);
  return PointCloud(std::move(pts));
}

void BM_bcd_solve(benchmark::State& state) {
  const Index n = state.range(0);
  const PointCloud source = random_cloud(n, 8, 1);
  const PointCloud target = random_cloud(n, 5, 2);
  const auto a = DiscreteMeasure::uniform(n);
  const auto b = DiscreteMeasure::uniform(n);
  SolveConfig cfg;
  cfg.epsilon = 0.05;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.sinkhorn_tol = 1e-8;
  cfg.outer_tol = 1e-6;
  cfg.max_outer_iters = 30;
  for (auto _ : state) {
    auto res = solve_cruot(source, a, target, b, cfg);
    benchmark::DoNotOptimize(res.plan.entries.data());
  }
}
BENCHMARK(BM_bcd_solve)->Arg(64)->Arg(128);

void BM_toy_pipeline(benchmark::State& state) {
  ToyOptions opts;
  opts.n_source = state.range(0);
  opts.n_target = state.range(0);
  for (auto _ : state) {
    auto src = generate_toy_source(opts);
    auto tgt = generate_toy_target(opts);
    benchmark::DoNotOptimize(src.cloud.points.data());
    benchmark::DoNotOptimize(tgt.cloud.points.data());
  }
}
BENCHMARK(BM_toy_pipeline)->Arg(300)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
