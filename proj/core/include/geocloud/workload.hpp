#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "geocloud/power_model.hpp"
#include "geocloud/random.hpp"

namespace geocloud {

enum class VmId : std::uint32_t {};
enum class PmId : std::uint32_t {};

constexpr std::size_t index_of(VmId id) noexcept { return static_cast<std::size_t>(id); }
constexpr std::size_t index_of(PmId id) noexcept { return static_cast<std::size_t>(id); }

/// A VM request. The VM is alive during steps [boot_t, delete_t).
struct VmSpec {
  VmId id{};
  int vcpus = 1;
  int ram_gb = 8;
  double beta = 1.0;
  int boot_t = 0;
  int delete_t = 1;

  /// Throws InvariantViolation unless vcpus in {1, 2}, ram in [8, 16],
  /// beta in [0, 1] and boot_t < delete_t.
  void validate() const;
};

struct PmSpec {
  PmId id{};
  int cores = 4;
  int ram_gb = 32;
  std::string location;
  Architecture architecture = Architecture::arm;

  /// Throws InvariantViolation unless cores in [1, 4] and ram in [16, 32].
  void validate() const;
};

/// Exponential distribution truncated to [0, 1].
struct BetaDistribution {
  double rate = 5.0;

  /// Analytic mean of the truncated distribution.
  double mean() const;
};

/// Inverse-CDF draw from the truncated exponential; always in [0, 1].
double sample_beta(const BetaDistribution& dist, Rng& rng);

/// Every VM gets the same beta.
struct FixedBeta {
  double beta = 0.0;
};

/// Betas drawn uniformly from an empirical list (e.g. PlanetLab averages).
struct EmpiricalBeta {
  std::vector<double> values;
  std::filesystem::path source;  ///< CSV the values came from, if any
};

using BetaModel = std::variant<BetaDistribution, FixedBeta, EmpiricalBeta>;

double sample_beta(const BetaModel& model, Rng& rng);

/// Uniform cores in 1..4 and RAM in 16..32 GB; locations are assigned
/// round-robin and then shuffled. PM ids are 0..n_pms-1.
std::vector<PmSpec> gen_fleet(std::size_t n_pms, std::span<const std::string> locations,
                              Architecture architecture, Rng& rng);

/// Uniform boot step in 0..horizon-2, deletion in boot+1..horizon, 1-2 vCPUs,
/// 8..16 GB RAM. VM ids are 0..n_vms-1.
std::vector<VmSpec> gen_requests(std::size_t n_vms, int horizon_steps, const BetaModel& betas,
                                 Rng& rng);

/// Reads `vm_id,avg_cpu_pct` and maps each average CPU usage to beta = pct / 100.
std::vector<double> load_planetlab_betas(const std::filesystem::path& path);

}  // namespace geocloud
