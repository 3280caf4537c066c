#include <benchmark/benchmark.h>

#include <random>

#include "cruot/sinkhorn.hpp"

namespace {

using namespace cruot;

Matrix random_cost(Index n, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix c(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) c(i, j) = u(rng);
  return c;
}

void BM_sinkhorn_balanced(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix cost = random_cost(n, n, 42);
  const auto a = DiscreteMeasure::uniform(n);
  const auto b = DiscreteMeasure::uniform(n);
  for (auto _ : state) {
    auto res = solve_uot(cost, a, b, EntropySpec::balanced(),
                         EntropySpec::balanced(), 0.05, 1e-6, 5000);
    benchmark::DoNotOptimize(res.plan.entries.data());
  }
}
BENCHMARK(BM_sinkhorn_balanced)->Arg(64)->Arg(128)->Arg(256);

void BM_sinkhorn_scaled_kl(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix cost = random_cost(n, n, 43);
  const auto a = DiscreteMeasure::uniform(n);
  const auto b = DiscreteMeasure::uniform(n);
  const auto kl = EntropySpec::scaled_kl(1.0);
  for (auto _ : state) {
    auto res = solve_uot(cost, a, b, kl, kl, 0.05, 1e-6, 5000);
    benchmark::DoNotOptimize(res.plan.entries.data());
  }
}
BENCHMARK(BM_sinkhorn_scaled_kl)->Arg(64)->Arg(128)->Arg(256);

}  // namespace
