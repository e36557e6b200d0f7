#include "geocloud/cloud_state.hpp"

#include <algorithm>
#include <string>

#include "geocloud/error.hpp"

namespace geocloud {

CloudState::CloudState(std::span<const PmSpec> fleet, std::size_t vm_count,
                       std::span<const int> max_steps)
    : host_of_(vm_count) {
  if (max_steps.size() != fleet.size()) {
    throw InvariantViolation("one initial frequency step per PM is required");
  }
  hosts_.reserve(fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (index_of(fleet[i].id) != i) throw InvariantViolation("PM ids must equal their index");
    Host h;
    h.cores = fleet[i].cores;
    h.ram = fleet[i].ram_gb;
    h.q = max_steps[i];
    hosts_.push_back(std::move(h));
  }
}

bool CloudState::fits(PmId pm, const VmSpec& vm) const {
  const Host& h = hosts_.at(index_of(pm));
  return h.used_vcpus + vm.vcpus <= h.cores && h.used_ram + vm.ram_gb <= h.ram;
}

double CloudState::vcpu_utilisation(PmId pm) const {
  const Host& h = hosts_.at(index_of(pm));
  return static_cast<double>(h.used_vcpus) / h.cores;
}

void CloudState::assign(const VmSpec& vm, PmId pm) {
  auto& slot = host_of_.at(index_of(vm.id));
  if (slot) throw InvariantViolation("VM " + std::to_string(index_of(vm.id)) + " already allocated");
  if (!fits(pm, vm)) {
    throw InvariantViolation("VM " + std::to_string(index_of(vm.id)) + " does not fit PM " +
                             std::to_string(index_of(pm)));
  }
  Host& h = hosts_[index_of(pm)];
  h.vms.insert(std::lower_bound(h.vms.begin(), h.vms.end(), vm.id), vm.id);
  h.used_vcpus += vm.vcpus;
  h.used_ram += vm.ram_gb;
  h.active = true;
  slot = pm;
  ++allocated_;
}

void CloudState::release(const VmSpec& vm) {
  auto& slot = host_of_.at(index_of(vm.id));
  if (!slot) throw InvariantViolation("VM " + std::to_string(index_of(vm.id)) + " is not allocated");
  Host& h = hosts_[index_of(*slot)];
  h.vms.erase(std::lower_bound(h.vms.begin(), h.vms.end(), vm.id));
  h.used_vcpus -= vm.vcpus;
  h.used_ram -= vm.ram_gb;
  slot.reset();
  --allocated_;
}

std::map<VmId, PmId> CloudState::allocation() const {
  std::map<VmId, PmId> out;
  for (std::size_t i = 0; i < host_of_.size(); ++i) {
    if (host_of_[i]) out.emplace(VmId{static_cast<std::uint32_t>(i)}, *host_of_[i]);
  }
  return out;
}

std::size_t CloudState::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(hosts_.begin(), hosts_.end(), [](const Host& h) { return h.active; }));
}

void CloudState::check_invariants() const {
  std::size_t hosted_total = 0;
  for (std::size_t p = 0; p < hosts_.size(); ++p) {
    const Host& h = hosts_[p];
    if (h.used_vcpus > h.cores || h.used_ram > h.ram) {
      throw InvariantViolation("PM " + std::to_string(p) + " exceeds its capacity");
    }
    if (h.active != !h.vms.empty()) {
      throw InvariantViolation("PM " + std::to_string(p) + " active flag disagrees with its load");
    }
    for (VmId vm : h.vms) {
      const auto& slot = host_of_.at(index_of(vm));
      if (!slot || index_of(*slot) != p) {
        throw InvariantViolation("VM " + std::to_string(index_of(vm)) + " host mismatch");
      }
    }
    hosted_total += h.vms.size();
  }
  if (hosted_total != allocated_) throw InvariantViolation("allocation count mismatch");
}

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::place:
      return "place";
    case ActionKind::migrate:
      return "migrate";
    case ActionKind::evict:
      return "evict";
    case ActionKind::suspend:
      return "suspend";
    case ActionKind::set_freq:
      return "set_freq";
  }
  return "unknown";
}

void apply_pass(CloudState& state, std::span<const Action> actions,
                std::span<const VmSpec> vms) {
  for (const Action& a : actions) {
    if (a.kind != ActionKind::migrate && a.kind != ActionKind::evict) continue;
    const VmSpec& vm = vms[index_of(a.vm)];
    if (state.host_of(vm.id) != a.from) {
      throw InvariantViolation("migration source does not match the replayed state");
    }
    state.release(vm);
  }
  for (const Action& a : actions) {
    switch (a.kind) {
      case ActionKind::place:
      case ActionKind::migrate:
        state.assign(vms[index_of(a.vm)], a.pm);
        break;
      case ActionKind::evict:
        break;
      case ActionKind::suspend:
        state.set_active(a.pm, false);
        break;
      case ActionKind::set_freq:
        state.set_freq_step(a.pm, a.to_q);
        break;
    }
  }
}

}  // namespace geocloud
