#include <benchmark/benchmark.h>

#include <numbers>

#include "diffeo/cli/spec_file.hpp"
#include "diffeo/diffeo.hpp"

using namespace diffeo;

namespace {

const cli::SpecFile& spec(const std::string& name) {
  static std::map<std::string, cli::SpecFile> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, cli::load_spec(std::string(DIFFEO_SOURCE_DIR) + "/specs/" + name + ".json")).first;
  return it->second;
}

AlgebraPtr algebra(const std::string& name) {
  const auto& s = spec(name);
  return std::make_shared<FieldAlgebra>(FieldAlgebra::declare(s.space, s.fields));
}

void BM_AssembleD(benchmark::State& state, const std::string& name, int degree) {
  const auto a = algebra(name);
  const auto& s = spec(name);
  CohomologyOptions o;
  o.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_d_matrix(a, *s.basis, degree, o));
}
BENCHMARK_CAPTURE(BM_AssembleD, circle_d0, std::string("circle"), 0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AssembleD, sphere_d1, std::string("so3_orbit"), 1)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AssembleD, torus_d1, std::string("torus"), 1)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Cohomology(benchmark::State& state, const std::string& name) {
  const auto a = algebra(name);
  const auto& s = spec(name);
  for (auto _ : state) benchmark::DoNotOptimize(de_rham_cohomology(a, *s.basis, s.max_degree));
}
BENCHMARK_CAPTURE(BM_Cohomology, circle, std::string("circle"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Cohomology, sphere, std::string("so3_orbit"))->Unit(benchmark::kMillisecond);

void BM_IntegrateRotation(benchmark::State& state) {
  const auto& s = spec("rotation");
  FlowOptions o;
  o.dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s.fields[0], Vector{1.0, 0.0}, std::numbers::pi / 2, o));
}
BENCHMARK(BM_IntegrateRotation)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_FlowPlaqueJet(benchmark::State& state) {
  const auto& s = spec("rotation");
  const LocalFlowPtr phi = flow_from_field(s.fields[0]);
  const Plaque p = phi->apply(Plaque(affine_map(1, 2, {0.0, 1.0}, {1.0, 0.0}), 1.0));
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(p.jet(order));
}
BENCHMARK(BM_FlowPlaqueJet)->DenseRange(1, 3);

void BM_TangentReport(benchmark::State& state) {
  const auto& s = spec("torus");
  for (auto _ : state) benchmark::DoNotOptimize(tangent_set_dimension(*s.space, Vector{1.0, 0.0, 0.0, 1.0}, 1));
}
BENCHMARK(BM_TangentReport)->Unit(benchmark::kMillisecond);

}  // namespace
