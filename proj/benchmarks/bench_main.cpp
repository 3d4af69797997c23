#include <benchmark/benchmark.h>

#include "bistatic/bistatic.hpp"

using namespace bistatic;

namespace {

SensingModel model(int subcarriers) {
  Scenario s = default_scenario();
  s.subcarrier_offsets = subcarrier_grid(subcarriers, 2.4e6);
  return build_sensing_model(with_target(s, {-6.0, 14.0}));
}

void BM_Speb(benchmark::State& state) {
  const SensingModel m = model(static_cast<int>(state.range(0)));
  const BeamCovariance B = uniform_initial(m);
  for (auto _ : state) benchmark::DoNotOptimize(speb(m, B));
}
BENCHMARK(BM_Speb)->Arg(2)->Arg(16);

void BM_Gradient(benchmark::State& state) {
  const SensingModel m = model(static_cast<int>(state.range(0)));
  const BeamCovariance B = uniform_initial(m);
  for (auto _ : state) benchmark::DoNotOptimize(speb_gradient(m, B));
}
BENCHMARK(BM_Gradient)->Arg(2)->Arg(16);

void BM_FimFromDerivatives(benchmark::State& state) {
  const Scenario s = with_target(default_scenario(), {-6.0, 14.0});
  const SensingModel m = build_sensing_model(s);
  const auto pilots = realize_pilots(s, uniform_initial(m));
  for (auto _ : state) benchmark::DoNotOptimize(fim_from_derivatives(s, pilots));
}
BENCHMARK(BM_FimFromDerivatives);

void BM_Optimize(benchmark::State& state) {
  const SensingModel m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimize(m));
}
BENCHMARK(BM_Optimize)->Arg(2)->Arg(6);

void BM_PebMap(benchmark::State& state) {
  GridSpec g;
  g.nx = g.ny = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(peb_map(default_scenario(), g));
}
BENCHMARK(BM_PebMap)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
