#include "geocloud/pricing.hpp"

#include "geocloud/error.hpp"

namespace geocloud {

std::string_view to_string(PricingMode mode) noexcept {
  return mode == PricingMode::performance_based ? "performance_based" : "perceived_performance";
}

PricingMode parse_pricing_mode(std::string_view name) {
  if (name == "performance_based") return PricingMode::performance_based;
  if (name == "perceived_performance") return PricingMode::perceived_performance;
  throw ConfigError("unknown pricing mode '" + std::string(name) +
                    "' (expected performance_based|perceived_performance)");
}

void PricingScheme::validate() const {
  if (c_base < 0.0 || c_cpu < 0.0 || c_ram < 0.0) {
    throw InvariantViolation("pricing scheme '" + name + "' has a negative price");
  }
  if (!(ramsize_base > 0.0)) throw InvariantViolation("ramsize_base must be positive");
  if (!(arch_scale >= 1.0)) throw InvariantViolation("arch_scale must be >= 1");
}

PricingScheme PricingScheme::elastichosts(PricingMode mode) {
  return {"elastichosts", 0.027, 0.018, 0.025, 1.0, mode, 1.0};
}

PricingScheme PricingScheme::cloudsigma(PricingMode mode) {
  return {"cloudsigma", 0.0045, 0.0017, 0.004, 1.0, mode, 1.0};
}

PricingScheme PricingScheme::preset(std::string_view name, PricingMode mode) {
  if (name == "elastichosts") return elastichosts(mode);
  if (name == "cloudsigma") return cloudsigma(mode);
  throw ConfigError("unknown pricing scheme '" + std::string(name) +
                    "' (expected elastichosts|cloudsigma)");
}

double effective_frequency(PricingMode mode, double beta, double f_ghz, double f_max_ghz) {
  if (mode == PricingMode::performance_based) return f_ghz;
  return beta * f_ghz + (1.0 - beta) * f_max_ghz;
}

double vm_price(const PricingScheme& scheme, const VmSpec& vm, double per_vcpu_freq,
                const FrequencyLadder& ladder) {
  if (!(per_vcpu_freq >= ladder.f_min() - kLadderTolerance) ||
      !(per_vcpu_freq <= ladder.f_max() + kLadderTolerance)) {
    throw FrequencyOutOfRange("vCPU frequency " + std::to_string(per_vcpu_freq) +
                              " GHz outside ladder bounds");
  }
  const double f_base = ladder.f_min();
  const double f_cpu = effective_frequency(scheme.mode, vm.beta, per_vcpu_freq, ladder.f_max());
  const double cpu_units = vm.vcpus * ((f_cpu - f_base) / f_base);
  const double price = scheme.c_base + scheme.c_cpu * cpu_units +
                       scheme.c_ram * (vm.ram_gb / scheme.ramsize_base);
  return price / scheme.arch_scale;
}

double pm_revenue(const PricingScheme& scheme, std::span<const VmSpec> vms, double pm_freq,
                  const FrequencyLadder& ladder) {
  const double f = ladder.frequency(ladder.step_of(pm_freq));
  double revenue = 0.0;
  for (const auto& vm : vms) revenue += vm_price(scheme, vm, f, ladder);
  return revenue;
}

}  // namespace geocloud
