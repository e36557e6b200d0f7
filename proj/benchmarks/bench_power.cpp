#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "geocloud/power_model.hpp"
#include "geocloud/surface_fit.hpp"

using namespace geocloud;

static void BM_HostPower(benchmark::State& state) {
  const auto model = PowerModel::arm();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> beta(0.0, 1.0);
  std::vector<double> betas(static_cast<std::size_t>(state.range(0)));
  for (auto& b : betas) b = beta(rng);

  int q = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.power_at_step(q, betas, 4));
    q = q % 11 + 1;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HostPower)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

static void BM_SurfaceFit(benchmark::State& state) {
  const auto model = PowerModel::arm();
  std::vector<PowerSample> grid;
  for (int q = 1; q <= 11; ++q)
    for (int c = 1; c <= 4; ++c) grid.push_back({double(q), double(c), model.active_power(q, c)});

  for (auto _ : state) benchmark::DoNotOptimize(fit_power_surface(grid));
}
BENCHMARK(BM_SurfaceFit);
