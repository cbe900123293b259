#include <benchmark/benchmark.h>

#include <random>

#include "kamforge/diophantine.hpp"
#include "kamforge/lie.hpp"
#include "kamforge/sampling.hpp"
#include "kamforge/series.hpp"

using namespace kamforge;

namespace {

void BM_Bracket(benchmark::State& state) {
  const int terms = static_cast<int>(state.range(0));
  const TruncationSpec t{2, 6, 3, 6};
  SeriesShape shape;
  shape.max_terms = terms;
  shape.max_p_degree = 3;
  shape.max_q = 3;
  std::mt19937_64 rng(1);
  const auto f = random_series(ScalarContext::quadratic(2), t, BracketMode::torus, shape, rng);
  const auto g = random_series(ScalarContext::quadratic(2), t, BracketMode::torus, shape, rng);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_bracket(f, g));
}
BENCHMARK(BM_Bracket)->RangeMultiplier(2)->Range(4, 64);

void BM_Flow(benchmark::State& state) {
  const TruncationSpec t{2, 8, static_cast<int>(state.range(0)), 8};
  SeriesShape shape;
  SeriesShape gs;
  gs.min_t = 1;
  std::mt19937_64 rng(2);
  const auto f = random_series(ScalarContext::rational(), t, BracketMode::torus, shape, rng);
  const auto S = random_series(ScalarContext::rational(), t, BracketMode::torus, gs, rng);
  const Generator g = HamiltonianGenerator{S};
  for (auto _ : state) benchmark::DoNotOptimize(flow_apply(g, f));
}
BENCHMARK(BM_Flow)->DenseRange(2, 5);

void BM_KolmogorovConstant(benchmark::State& state) {
  const auto omega = FrequencyVector::parse(ScalarContext::quadratic(2), {"1", "[0, 1, 2]"});
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov_constant(omega, 1, N));
  state.SetComplexityN(N);
}
BENCHMARK(BM_KolmogorovConstant)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_MatrixExp(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix X(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(X));
}
BENCHMARK(BM_MatrixExp)->RangeMultiplier(2)->Range(2, 32);

}  // namespace
BENCHMARK_MAIN();
