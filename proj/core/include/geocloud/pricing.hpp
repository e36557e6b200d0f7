#pragma once

#include <span>
#include <string>
#include <string_view>

#include "geocloud/power_model.hpp"
#include "geocloud/workload.hpp"

namespace geocloud {

enum class PricingMode { performance_based, perceived_performance };

std::string_view to_string(PricingMode mode) noexcept;
PricingMode parse_pricing_mode(std::string_view name);

/// Hourly VM price model:
///   [c_base + c_cpu * sum_vcpu (f_i - f_base) / f_base + c_ram * ram / ramsize_base] / arch_scale
struct PricingScheme {
  std::string name;
  double c_base = 0.0;        ///< $/h at minimum capacity
  double c_cpu = 0.0;         ///< $/h per unit of relative frequency above f_base
  double c_ram = 0.0;         ///< $/h per ramsize_base of RAM
  double ramsize_base = 1.0;  ///< GB
  PricingMode mode = PricingMode::perceived_performance;
  double arch_scale = 1.0;  ///< divisor applied to the whole price

  /// Throws InvariantViolation on negative prices, ramsize_base <= 0 or arch_scale < 1.
  void validate() const;

  static PricingScheme elastichosts(PricingMode mode = PricingMode::perceived_performance);
  static PricingScheme cloudsigma(PricingMode mode = PricingMode::perceived_performance);
  /// "elastichosts" or "cloudsigma"; throws ConfigError otherwise.
  static PricingScheme preset(std::string_view name,
                              PricingMode mode = PricingMode::perceived_performance);
};

/// ARM hosts are priced 11x below Intel hosts.
constexpr double arch_price_scale(Architecture arch) noexcept {
  return arch == Architecture::arm ? 11.0 : 1.0;
}

/// Copy of `scheme` with the architecture's price divisor applied.
inline PricingScheme scaled_for(PricingScheme scheme, Architecture arch) {
  scheme.arch_scale = arch_price_scale(arch);
  return scheme;
}

/// Frequency the customer is billed for. In perceived-performance mode an
/// I/O-bound workload (beta near 0) is billed close to f_max regardless of f.
double effective_frequency(PricingMode mode, double beta, double f_ghz, double f_max_ghz);

/// Hourly price of `vm` when each of its vCPUs runs at `per_vcpu_freq`.
/// Throws FrequencyOutOfRange when the frequency is outside the ladder bounds.
double vm_price(const PricingScheme& scheme, const VmSpec& vm, double per_vcpu_freq,
                const FrequencyLadder& ladder);

/// Hourly revenue of a host: the sum of its VMs' prices at `pm_freq`.
/// Throws OutOfRange / OffLadderFrequency when pm_freq is not a ladder step.
double pm_revenue(const PricingScheme& scheme, std::span<const VmSpec> vms, double pm_freq,
                  const FrequencyLadder& ladder);

}  // namespace geocloud
