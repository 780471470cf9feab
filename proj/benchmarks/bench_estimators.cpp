#include <benchmark/benchmark.h>

#include "dbtsw/dbtsw.hpp"

namespace {

using namespace dbtsw;

Matrix normal_cloud(Eigen::Index n, Eigen::Index d, double shift, const SeedSpec& seed) {
  Engine rng = seed.engine();
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) m(i, c) = shift + standard_normal(rng);
  }
  return m;
}

EstimatorConfig bench_config(Variant v, std::size_t L, std::size_t k) {
  EstimatorConfig cfg;
  cfg.variant = v;
  cfg.L = L;
  cfg.k = k;
  cfg.seed = SeedSpec{1, 0};
  return cfg;
}

void BM_Estimate(benchmark::State& state, Variant v) {
  const auto n = state.range(0);
  const auto d = state.range(1);
  const auto mu = uniform_measure(normal_cloud(n, d, 0.0, {7, 0}));
  const auto nu = uniform_measure(normal_cloud(n, d, 0.5, {7, 1}));
  const auto cfg = bench_config(v, 100, 4);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(mu, nu, cfg).value);
  state.SetComplexityN(n);
}

void BM_ValueAndGrad(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix X = normal_cloud(n, 2, 0.0, {3, 0});
  const auto nu = uniform_measure(normal_cloud(n, 2, 0.5, {3, 1}));
  const Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const auto trees = sample_estimator_trees(bench_config(Variant::DbTSW, 25, 4), 2);
  const SplittingConfig split;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dbtsw_value_and_grad(X, w, nu, trees, split).value);
  }
}

void BM_TreeMetric(benchmark::State& state, bool fast) {
  const auto n = state.range(0);
  const auto mu = uniform_measure(normal_cloud(n, 8, 0.0, {5, 0}));
  const auto nu = uniform_measure(normal_cloud(n, 8, 0.5, {5, 1}));
  TreeSamplerConfig sc;
  sc.k = 8;
  const TreeSystem t = sample_trees(sc, 8, 1, {5, 2}).front();
  const auto p = project(mu, t, {});
  const auto q = project(nu, t, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fast ? tree_wasserstein_concurrent(p, q, t)
                                  : tree_wasserstein_general(p, q, t));
  }
}

void BM_Assignment(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix X = normal_cloud(n, 2, 0.0, {9, 0});
  const Matrix Y = normal_cloud(n, 2, 1.0, {9, 1});
  for (auto _ : state) benchmark::DoNotOptimize(exact_wp_assignment(X, Y, 2.0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Estimate, dbtsw, Variant::DbTSW)
    ->ArgsProduct({{1000, 2000, 4000}, {50, 100}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimate, dbtsw_orth, Variant::DbTSWOrth)
    ->Args({1000, 50})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimate, tswsl, Variant::TSWSLChain)
    ->Args({1000, 50})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimate, sw, Variant::SW)->Args({1000, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValueAndGrad)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TreeMetric, concurrent, true)->Arg(200)->Arg(2000);
BENCHMARK_CAPTURE(BM_TreeMetric, general, false)->Arg(200)->Arg(2000);
BENCHMARK(BM_Assignment)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
