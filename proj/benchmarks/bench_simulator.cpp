#include <benchmark/benchmark.h>

#include "geocloud/simulator.hpp"

using namespace geocloud;

namespace {

Scenario sized(benchmark::State& state, ControllerKind kind) {
  Scenario s;
  s.n_pms = static_cast<std::size_t>(state.range(0));
  s.n_vms = static_cast<std::size_t>(state.range(0));
  s.controller = kind;
  return s;
}

}  // namespace

// World generation is outside the timed loop; only the control loop is measured.
static void BM_Run(benchmark::State& state, ControllerKind kind) {
  const Scenario s = sized(state, kind);
  const World w = materialize(s);
  for (auto _ : state) benchmark::DoNotOptimize(run(s, w));
  state.SetItemsProcessed(state.iterations() * s.horizon_steps);
}
BENCHMARK_CAPTURE(BM_Run, bfd, ControllerKind::bfd)->RangeMultiplier(4)->Range(200, 3200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, bcf, ControllerKind::bcf)->RangeMultiplier(4)->Range(200, 3200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, bcffs, ControllerKind::bcffs)->RangeMultiplier(4)->Range(200, 3200)->Unit(benchmark::kMillisecond);

static void BM_Materialize(benchmark::State& state) {
  const Scenario s = sized(state, ControllerKind::bcffs);
  for (auto _ : state) benchmark::DoNotOptimize(materialize(s));
}
BENCHMARK(BM_Materialize)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
