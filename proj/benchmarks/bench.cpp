#include <benchmark/benchmark.h>

#include "coldcav/dynamics.hpp"
#include "coldcav/model.hpp"
#include "coldcav/steady_state.hpp"
#include "coldcav/zeeman.hpp"

namespace {

using namespace coldcav;

ModelParams paper_params(ModelVariant variant) {
  ModelParams p;
  p.delta = 44.0;
  p.gamma_cav = 0.055;
  p.kappa = 0.96;
  p.cooperativity = 400.0;
  p.beta = 1.07e-5;
  p.gamma_p = 1e-3;
  p.drive = 2.1;
  p.phi0 = -1.25;
  p.variant = variant;
  return p;
}

void BM_FieldRhs(benchmark::State& state) {
  const ModelParams p = paper_params(
      state.range(0) ? ModelVariant::Saturated : ModelVariant::Simple);
  SystemState s;
  s.field = {7.0, -2.0};
  s.orientation = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field_rhs(s, p));
    benchmark::DoNotOptimize(orientation_rhs(s, p));
  }
}
BENCHMARK(BM_FieldRhs)->Arg(0)->Arg(1);

void BM_FindFixedPoints(benchmark::State& state) {
  const ModelParams p = paper_params(
      state.range(0) ? ModelVariant::Saturated : ModelVariant::Simple);
  for (auto _ : state) benchmark::DoNotOptimize(find_fixed_points(p));
}
BENCHMARK(BM_FindFixedPoints)->Arg(0)->Arg(1);

void BM_IntegrateStatic(benchmark::State& state) {
  const ModelParams p = paper_params(ModelVariant::Simple);
  const auto protocol = ScanProtocol::static_phase(-1.25, 500.0);
  SystemState dark;
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate(p, protocol, dark, 1e-8, 600));
  state.SetItemsProcessed(state.iterations() * 500);  // time units per run
}
BENCHMARK(BM_IntegrateStatic);

void BM_ZeemanEvolve(benchmark::State& state) {
  const auto init = zeeman::SublevelPopulations::equal_ground();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        zeeman::evolve_populations(init, 60.0, 40.0, 2000.0, 200));
}
BENCHMARK(BM_ZeemanEvolve);

void BM_InstabilityMapRow(benchmark::State& state) {
  const ModelParams p = paper_params(ModelVariant::Simple);
  for (auto _ : state)
    benchmark::DoNotOptimize(instability_map(p, -1.35, -1.10, 50, 2.13, 2.13, 1));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_InstabilityMapRow);

}  // namespace

BENCHMARK_MAIN();
