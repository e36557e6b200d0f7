#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "geocloud/cloud_state.hpp"
#include "geocloud/geotemporal.hpp"
#include "geocloud/power_model.hpp"
#include "geocloud/pricing.hpp"
#include "geocloud/workload.hpp"

namespace geocloud {

enum class ControllerKind { bfd, bcf, bcffs };

std::string_view to_string(ControllerKind kind) noexcept;
ControllerKind parse_controller(std::string_view name);

struct ControllerOptions {
  /// A hosting PM whose vCPU share of its cores is below this is underutilised.
  double underutil_threshold = 0.3;
  /// Skip PMs dominated by a PM that accepted no frequency decrease.
  bool prune = true;
};

/// Everything a controller pass may read at one step.
struct ControlInputs {
  int step = 0;
  double step_h = 1.0;
  std::span<const PmSpec> fleet;
  std::span<const VmSpec> vms;                 ///< indexed by VmId
  std::span<const SiteConditions> conditions;  ///< indexed by PmId, values at `step`
  const PowerModel* power_model = nullptr;
  const PricingScheme* pricing = nullptr;

  const PowerModel& model() const { return *power_model; }
};

/// Ordering key of the migration stage's PM lists: capacity decreasing, location cost
/// increasing, then PM id.
struct PmSortKey {
  double capacity = 0.0;
  double cost = 0.0;
  PmId id{};

  /// True when `a` is visited before `b`.
  friend bool operator<(const PmSortKey& a, const PmSortKey& b) noexcept {
    if (a.capacity != b.capacity) return a.capacity > b.capacity;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.id < b.id;
  }
};

/// capacity = (cores/4 + ram_gb/32) / 2; cost = price * pPUE(temp).
PmSortKey pm_sort_key(const PmSpec& pm, const SiteConditions& site);

/// Resource requirement used to order VMs: (vcpus/2 + ram_gb/16) / 2.
double vm_resource_score(const VmSpec& vm);

/// Beta of every vCPU hosted on `pm`.
std::vector<double> hosted_vcpu_betas(const CloudState& state, PmId pm,
                                      std::span<const VmSpec> vms);

/// IT power of `pm` at frequency step q (0 W when it hosts nothing).
double host_it_power(const CloudState& state, PmId pm, int q, const ControlInputs& in);
/// Energy cost of `pm` at step q over one control interval, cooling included.
double host_step_energy_cost(const CloudState& state, PmId pm, int q, const ControlInputs& in);
/// Revenue of `pm`'s VMs at step q over one control interval.
double host_step_revenue(const CloudState& state, PmId pm, int q, const ControlInputs& in);

/// VM migration stage. Places `pending` VMs and re-allocates VMs from
/// underutilised PMs, appending to `log`. Returns VMs that fit nowhere; they
/// stay unallocated and are retried next step.
std::vector<VmId> bcf_migration_stage(CloudState& state, std::span<const VmId> pending,
                                      const ControlInputs& in, const ControllerOptions& opts,
                                      ActionLog& log);

struct FrequencyStageStats {
  int hosts_considered = 0;
  int hosts_scaled = 0;
  /// PMs removed from the descent by the dominance rule.
  std::vector<PmId> pruned;
};

/// Frequency scaling stage. Resets every active PM to f_max, then
/// lowers each one step at a time while the one-step energy saving strictly
/// exceeds the one-step revenue loss.
FrequencyStageStats bcffs_frequency_stage(CloudState& state, const ControlInputs& in,
                                          const ControllerOptions& opts, ActionLog& log);

/// Relative tolerance under which two BFD power deltas count as equal.
inline constexpr double kBfdDeltaTolerance = 1e-9;

/// Power-aware best-fit-decreasing baseline: each VM goes to the fitting
/// active PM with the smallest power increase at f_max, ties going to the
/// PM left with the fewest spare vCPUs, then RAM, then the lowest id. Empty
/// PMs are chosen by idle power with the same tie-break. Frequencies are
/// never scaled.
std::vector<VmId> bfd_baseline(CloudState& state, std::span<const VmId> pending,
                               const ControlInputs& in, const ControllerOptions& opts,
                               ActionLog& log);

struct ControlPassResult {
  std::vector<VmId> deferred;
  FrequencyStageStats frequency;
};

/// One full controller invocation: migration stage, then the frequency stage
/// for bcffs.
ControlPassResult run_control_pass(ControllerKind kind, CloudState& state,
                                   std::span<const VmId> pending, const ControlInputs& in,
                                   const ControllerOptions& opts, ActionLog& log);

/// Summary of the frequency decisions recorded in a log.
struct DecisionAudit {
  long long decreases = 0;  ///< accepted single-step decreases
  long long records = 0;    ///< set_freq records that carry decreases
  long long violations = 0;  ///< records whose smallest margin is not > 0
  double predicted_saving = 0.0;
  double predicted_loss = 0.0;
};

DecisionAudit audit_frequency_decisions(std::span<const Action> log);

}  // namespace geocloud
