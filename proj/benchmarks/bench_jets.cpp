#include <benchmark/benchmark.h>

#include <random>

#include "diffeo/diffeo.hpp"

using namespace diffeo;

namespace {

Jet random_jet(std::mt19937_64& rng, int vars, int order, int target, Vector origin = {}) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(vars, order, target, std::move(origin));
  for (auto& v : j.raw()) v = u(rng);
  return j;
}

// args: variables, order
void BM_JetMul(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  const Jet a = random_jet(rng, n, k, 1), b = random_jet(rng, n, k, 1);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMul)->ArgsProduct({{1, 2, 3}, {2, 3, 4}});

void BM_JetCompose(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  const Jet inner = random_jet(rng, n, k, 3);
  const Jet outer = random_jet(rng, 3, k, 3, inner.value());
  for (auto _ : state) benchmark::DoNotOptimize(jet_compose(outer, inner));
}
BENCHMARK(BM_JetCompose)->ArgsProduct({{1, 2, 3}, {2, 3, 4}});

void BM_ExpressionJet(benchmark::State& state) {
  const expr::VariableTable v{{"x", 0}, {"y", 1}, {"z", 2}};
  const SmoothMapPtr f = expression_map({expr::parse("sin(x*y) + exp(z)/(1 + x^2) + sqrt(2 + y*z)", v)}, 3);
  const Vector p{0.2, -0.4, 0.7};
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jet_at(*f, p, k));
}
BENCHMARK(BM_ExpressionJet)->DenseRange(1, 4);

void BM_CoadjointPlaqueJet(benchmark::State& state) {
  const SmoothMapPtr k = coadjoint_plaque_map(MatrixGroup::builtin("SO3"), {0.0, 0.0, 1.0});
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jet_at(*k, Vector{0.0, 0.0, 0.0}, order));
}
BENCHMARK(BM_CoadjointPlaqueJet)->DenseRange(1, 3);

}  // namespace
