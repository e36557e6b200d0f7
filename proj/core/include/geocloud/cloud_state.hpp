#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "geocloud/workload.hpp"

namespace geocloud {

/// Allocation of VMs to PMs plus the frequency step of every PM.
///
/// VM and PM ids index into the fleet and request vectors. Hosted VM lists
/// are kept sorted by id so that every iteration order is deterministic.
class CloudState {
 public:
  CloudState() = default;
  /// All PMs start inactive at their highest frequency step.
  CloudState(std::span<const PmSpec> fleet, std::size_t vm_count, std::span<const int> max_steps);

  std::size_t pm_count() const noexcept { return hosts_.size(); }
  std::size_t vm_count() const noexcept { return host_of_.size(); }

  std::optional<PmId> host_of(VmId vm) const { return host_of_.at(index_of(vm)); }
  std::span<const VmId> hosted(PmId pm) const { return hosts_.at(index_of(pm)).vms; }
  int used_vcpus(PmId pm) const { return hosts_.at(index_of(pm)).used_vcpus; }
  int used_ram(PmId pm) const { return hosts_.at(index_of(pm)).used_ram; }
  int cores(PmId pm) const { return hosts_.at(index_of(pm)).cores; }
  int ram(PmId pm) const { return hosts_.at(index_of(pm)).ram; }
  bool active(PmId pm) const { return hosts_.at(index_of(pm)).active; }
  int freq_step(PmId pm) const { return hosts_.at(index_of(pm)).q; }

  bool fits(PmId pm, const VmSpec& vm) const;
  /// Fraction of the PM's cores claimed by hosted vCPUs.
  double vcpu_utilisation(PmId pm) const;

  /// Places an unallocated VM; marks the PM active. Throws InvariantViolation
  /// when the VM is already allocated or does not fit.
  void assign(const VmSpec& vm, PmId pm);
  /// Detaches an allocated VM. The PM's active flag is left unchanged.
  void release(const VmSpec& vm);
  void set_active(PmId pm, bool active) { hosts_.at(index_of(pm)).active = active; }
  void set_freq_step(PmId pm, int q) { hosts_.at(index_of(pm)).q = q; }

  std::map<VmId, PmId> allocation() const;
  std::size_t allocated_count() const noexcept { return allocated_; }
  std::size_t active_count() const;

  /// Throws InvariantViolation when a capacity or bookkeeping invariant fails.
  void check_invariants() const;

  friend bool operator==(const CloudState&, const CloudState&) = default;

 private:
  struct Host {
    int cores = 0;
    int ram = 0;
    int used_vcpus = 0;
    int used_ram = 0;
    int q = 1;
    bool active = false;
    std::vector<VmId> vms;

    friend bool operator==(const Host&, const Host&) = default;
  };

  std::vector<Host> hosts_;
  std::vector<std::optional<PmId>> host_of_;
  std::size_t allocated_ = 0;
};

enum class ActionKind { place, migrate, evict, suspend, set_freq };

std::string_view to_string(ActionKind kind) noexcept;

/// One controller decision. Field use depends on `kind`:
///   place:    vm -> pm
///   migrate:  vm from `from` -> pm
///   evict:    vm detached from `from` because it fits nowhere (deferred)
///   suspend:  pm
///   set_freq: pm from_q -> to_q; for frequency-stage records the predicted
///             totals and the smallest single-step margin of the accepted
///             decreases (saving - loss) are kept for auditing.
struct Action {
  int step = 0;
  ActionKind kind = ActionKind::place;
  VmId vm{};
  PmId pm{};
  PmId from{};
  int from_q = 0;
  int to_q = 0;
  int decreases = 0;
  double predicted_saving = 0.0;
  double predicted_loss = 0.0;
  double min_margin = 0.0;
};

using ActionLog = std::vector<Action>;

/// Replays the actions of one controller pass onto `state`.
///
/// A pass detaches every VM it re-allocates before placing any of them, so
/// all migrating and evicted VMs are released first and then the actions run in order.
void apply_pass(CloudState& state, std::span<const Action> actions, std::span<const VmSpec> vms);

}  // namespace geocloud
