#include "geocloud/workload.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "geocloud/error.hpp"

namespace geocloud {

void VmSpec::validate() const {
  if (vcpus < 1 || vcpus > 2) throw InvariantViolation("VM vcpus must be 1 or 2");
  if (ram_gb < 8 || ram_gb > 16) throw InvariantViolation("VM RAM must be within 8..16 GB");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvariantViolation("VM beta must be within [0, 1]");
  if (boot_t < 0 || !(boot_t < delete_t)) {
    throw InvariantViolation("VM needs 0 <= boot_t < delete_t");
  }
}

void PmSpec::validate() const {
  if (cores < 1 || cores > 4) throw InvariantViolation("PM cores must be within 1..4");
  if (ram_gb < 16 || ram_gb > 32) throw InvariantViolation("PM RAM must be within 16..32 GB");
}

double BetaDistribution::mean() const {
  if (!(rate > 0.0)) throw InvariantViolation("beta rate must be positive");
  // E[X | X <= 1] for X ~ Exp(rate).
  return 1.0 / rate - std::exp(-rate) / (1.0 - std::exp(-rate));
}

double sample_beta(const BetaDistribution& dist, Rng& rng) {
  if (!(dist.rate > 0.0)) throw InvariantViolation("beta rate must be positive");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  const double beta = -std::log1p(-u * -std::expm1(-dist.rate)) / dist.rate;
  return std::clamp(beta, 0.0, 1.0);
}

double sample_beta(const BetaModel& model, Rng& rng) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaDistribution>) {
          return sample_beta(m, rng);
        } else if constexpr (std::is_same_v<T, FixedBeta>) {
          if (!(m.beta >= 0.0 && m.beta <= 1.0)) {
            throw InvariantViolation("fixed beta must be within [0, 1]");
          }
          return m.beta;
        } else {
          if (m.values.empty()) throw InvariantViolation("empirical beta list is empty");
          std::uniform_int_distribution<std::size_t> pick(0, m.values.size() - 1);
          return m.values[pick(rng)];
        }
      },
      model);
}

std::vector<PmSpec> gen_fleet(std::size_t n_pms, std::span<const std::string> locations,
                              Architecture architecture, Rng& rng) {
  if (n_pms > 0 && locations.empty()) throw InvariantViolation("fleet needs at least one location");

  std::vector<std::string> sites;
  sites.reserve(n_pms);
  for (std::size_t i = 0; i < n_pms; ++i) sites.push_back(locations[i % locations.size()]);
  std::shuffle(sites.begin(), sites.end(), rng);

  std::uniform_int_distribution<int> cores(1, 4);
  std::uniform_int_distribution<int> ram(16, 32);
  std::vector<PmSpec> fleet;
  fleet.reserve(n_pms);
  for (std::size_t i = 0; i < n_pms; ++i) {
    PmSpec pm;
    pm.id = PmId{static_cast<std::uint32_t>(i)};
    pm.cores = cores(rng);
    pm.ram_gb = ram(rng);
    pm.location = std::move(sites[i]);
    pm.architecture = architecture;
    fleet.push_back(std::move(pm));
  }
  return fleet;
}

std::vector<VmSpec> gen_requests(std::size_t n_vms, int horizon_steps, const BetaModel& betas,
                                 Rng& rng) {
  if (horizon_steps < 1) throw InvariantViolation("horizon must be at least one step");

  std::uniform_int_distribution<int> boot(0, std::max(0, horizon_steps - 2));
  std::uniform_int_distribution<int> vcpus(1, 2);
  std::uniform_int_distribution<int> ram(8, 16);
  std::vector<VmSpec> out;
  out.reserve(n_vms);
  for (std::size_t i = 0; i < n_vms; ++i) {
    VmSpec vm;
    vm.id = VmId{static_cast<std::uint32_t>(i)};
    vm.boot_t = boot(rng);
    vm.delete_t = std::uniform_int_distribution<int>(vm.boot_t + 1, horizon_steps)(rng);
    vm.vcpus = vcpus(rng);
    vm.ram_gb = ram(rng);
    vm.beta = sample_beta(betas, rng);
    out.push_back(vm);
  }
  return out;
}

std::vector<double> load_planetlab_betas(const std::filesystem::path& path) {
  std::vector<double> out;
  csv::read(path, {"vm_id", "avg_cpu_pct"}, [&](const auto& f, std::size_t row) {
    const double pct = csv::to_double(f[1], row, "avg_cpu_pct");
    if (!(pct >= 0.0 && pct <= 100.0)) throw ParseError("avg_cpu_pct outside [0, 100]", row);
    out.push_back(pct / 100.0);
  });
  if (out.empty()) throw ParseError(path.string() + ": no rows", 1);
  return out;
}

}  // namespace geocloud
