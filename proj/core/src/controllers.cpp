#include "geocloud/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "geocloud/error.hpp"

namespace geocloud {

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::bfd:
      return "bfd";
    case ControllerKind::bcf:
      return "bcf";
    case ControllerKind::bcffs:
      return "bcffs";
  }
  return "unknown";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "bfd") return ControllerKind::bfd;
  if (name == "bcf") return ControllerKind::bcf;
  if (name == "bcffs") return ControllerKind::bcffs;
  throw ConfigError("unknown controller '" + std::string(name) + "' (expected bfd|bcf|bcffs)");
}

PmSortKey pm_sort_key(const PmSpec& pm, const SiteConditions& site) {
  return {(pm.cores / 4.0 + pm.ram_gb / 32.0) / 2.0, site.price * ppue(site.temp), pm.id};
}

double vm_resource_score(const VmSpec& vm) { return (vm.vcpus / 2.0 + vm.ram_gb / 16.0) / 2.0; }

std::vector<double> hosted_vcpu_betas(const CloudState& state, PmId pm,
                                      std::span<const VmSpec> vms) {
  std::vector<double> betas;
  for (VmId id : state.hosted(pm)) {
    const VmSpec& vm = vms[index_of(id)];
    betas.insert(betas.end(), static_cast<std::size_t>(vm.vcpus), vm.beta);
  }
  return betas;
}

double host_it_power(const CloudState& state, PmId pm, int q, const ControlInputs& in) {
  if (state.hosted(pm).empty()) return 0.0;
  const auto betas = hosted_vcpu_betas(state, pm, in.vms);
  return in.model().power_at_step(q, betas, state.cores(pm));
}

double host_step_energy_cost(const CloudState& state, PmId pm, int q, const ControlInputs& in) {
  const SiteConditions& site = in.conditions[index_of(pm)];
  const double p_tot = total_power(host_it_power(state, pm, q, in), site.temp);
  return step_energy_cost(p_tot, site.price, in.step_h);
}

double host_step_revenue(const CloudState& state, PmId pm, int q, const ControlInputs& in) {
  const FrequencyLadder& ladder = in.model().ladder();
  const double f = ladder.frequency(q);
  double revenue = 0.0;
  for (VmId id : state.hosted(pm)) revenue += vm_price(*in.pricing, in.vms[index_of(id)], f, ladder);
  return revenue * in.step_h;
}

namespace {

struct Candidate {
  VmId vm;
  std::optional<PmId> source;
};

// Collects pending VMs plus every VM on an underutilised PM, detaches the
// latter and orders the list by resource requirement, largest first.
std::vector<Candidate> collect_candidates(CloudState& state, std::span<const VmId> pending,
                                          const ControlInputs& in, double threshold) {
  std::vector<Candidate> out;
  out.reserve(pending.size());
  for (VmId id : pending) {
    if (state.host_of(id)) throw InvariantViolation("pending VM is already allocated");
    out.push_back({id, std::nullopt});
  }
  for (std::size_t p = 0; p < state.pm_count(); ++p) {
    const PmId pm{static_cast<std::uint32_t>(p)};
    const auto hosted = state.hosted(pm);
    if (hosted.empty() || !(state.vcpu_utilisation(pm) < threshold)) continue;
    for (VmId id : hosted) out.push_back({id, pm});
  }
  for (const Candidate& c : out) {
    if (c.source) state.release(in.vms[index_of(c.vm)]);
  }
  std::stable_sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    const double sa = vm_resource_score(in.vms[index_of(a.vm)]);
    const double sb = vm_resource_score(in.vms[index_of(b.vm)]);
    if (sa != sb) return sa > sb;
    return a.vm < b.vm;
  });
  return out;
}

void record_placement(CloudState& state, const Candidate& c, std::optional<PmId> target,
                      const ControlInputs& in, ActionLog& log, std::vector<VmId>& deferred) {
  const VmSpec& vm = in.vms[index_of(c.vm)];
  if (!target) {
    deferred.push_back(c.vm);
    if (c.source) {
      log.push_back({.step = in.step, .kind = ActionKind::evict, .vm = c.vm, .from = *c.source});
    }
    return;
  }
  state.assign(vm, *target);
  if (!c.source) {
    log.push_back({.step = in.step, .kind = ActionKind::place, .vm = c.vm, .pm = *target});
  } else if (*c.source != *target) {
    log.push_back(
        {.step = in.step, .kind = ActionKind::migrate, .vm = c.vm, .pm = *target, .from = *c.source});
  }
}

void suspend_empty(CloudState& state, int step, ActionLog& log) {
  for (std::size_t p = 0; p < state.pm_count(); ++p) {
    const PmId pm{static_cast<std::uint32_t>(p)};
    if (state.active(pm) && state.hosted(pm).empty()) {
      state.set_active(pm, false);
      log.push_back({.step = step, .kind = ActionKind::suspend, .pm = pm});
    }
  }
}

void check_inputs(const CloudState& state, const ControlInputs& in) {
  if (in.power_model == nullptr || in.pricing == nullptr) {
    throw InvariantViolation("controller inputs need a power model and a pricing scheme");
  }
  if (in.fleet.size() != state.pm_count() || in.conditions.size() != state.pm_count() ||
      in.vms.size() != state.vm_count()) {
    throw InvariantViolation("controller inputs do not match the cloud state");
  }
}

}  // namespace

std::vector<VmId> bcf_migration_stage(CloudState& state, std::span<const VmId> pending,
                                      const ControlInputs& in, const ControllerOptions& opts,
                                      ActionLog& log) {
  check_inputs(state, in);
  const auto candidates = collect_candidates(state, pending, in, opts.underutil_threshold);

  // Capacity and location cost are fixed within a pass, so one ordering
  // serves both the active and the inactive list.
  std::vector<PmSortKey> order;
  order.reserve(in.fleet.size());
  for (const PmSpec& pm : in.fleet) order.push_back(pm_sort_key(pm, in.conditions[index_of(pm.id)]));
  std::sort(order.begin(), order.end());

  std::vector<VmId> deferred;
  for (const Candidate& c : candidates) {
    const VmSpec& vm = in.vms[index_of(c.vm)];
    std::optional<PmId> target;
    for (const PmSortKey& key : order) {
      if (!state.hosted(key.id).empty() && state.fits(key.id, vm)) {
        target = key.id;
        break;
      }
    }
    if (!target) {
      // Activate inactive PMs in order until one can take the VM.
      for (const PmSortKey& key : order) {
        if (state.hosted(key.id).empty() && state.fits(key.id, vm)) {
          target = key.id;
          break;
        }
      }
    }
    record_placement(state, c, target, in, log, deferred);
  }
  suspend_empty(state, in.step, log);
  return deferred;
}

std::vector<VmId> bfd_baseline(CloudState& state, std::span<const VmId> pending,
                               const ControlInputs& in, const ControllerOptions& opts,
                               ActionLog& log) {
  check_inputs(state, in);
  const auto candidates = collect_candidates(state, pending, in, opts.underutil_threshold);
  const PowerModel& model = in.model();
  const int q_max = model.ladder().step_count();

  // Power deltas tie whenever the added vCPUs do not displace a busier one,
  // so near-equal deltas fall back to the tightest fit, then to PM id.
  struct Choice {
    PmId pm;
    double delta;
    int spare_vcpus;
    int spare_ram;
  };
  const auto better = [](const Choice& a, const std::optional<Choice>& b) {
    if (!b) return true;
    const double tol = kBfdDeltaTolerance * std::max(1.0, std::abs(b->delta));
    if (a.delta < b->delta - tol) return true;
    if (a.delta > b->delta + tol) return false;
    if (a.spare_vcpus != b->spare_vcpus) return a.spare_vcpus < b->spare_vcpus;
    return a.spare_ram < b->spare_ram;
  };

  std::vector<VmId> deferred;
  for (const Candidate& c : candidates) {
    const VmSpec& vm = in.vms[index_of(c.vm)];
    const auto spare = [&](PmId pm, double delta) {
      return Choice{pm, delta, state.cores(pm) - state.used_vcpus(pm) - vm.vcpus,
                    state.ram(pm) - state.used_ram(pm) - vm.ram_gb};
    };
    std::optional<Choice> best;
    for (std::size_t p = 0; p < state.pm_count(); ++p) {
      const PmId pm{static_cast<std::uint32_t>(p)};
      if (state.hosted(pm).empty() || !state.fits(pm, vm)) continue;
      auto betas = hosted_vcpu_betas(state, pm, in.vms);
      const double before = model.power_at_step(q_max, betas, state.cores(pm));
      betas.insert(betas.end(), static_cast<std::size_t>(vm.vcpus), vm.beta);
      const double delta = model.power_at_step(q_max, betas, state.cores(pm)) - before;
      const Choice choice = spare(pm, delta);
      if (better(choice, best)) best = choice;
    }
    if (!best) {
      for (std::size_t p = 0; p < state.pm_count(); ++p) {
        const PmId pm{static_cast<std::uint32_t>(p)};
        if (!state.hosted(pm).empty() || !state.fits(pm, vm)) continue;
        const Choice choice = spare(pm, model.idle_power(q_max));
        if (better(choice, best)) best = choice;
      }
    }
    record_placement(state, c, best ? std::optional<PmId>(best->pm) : std::nullopt, in, log,
                     deferred);
  }
  suspend_empty(state, in.step, log);
  return deferred;
}

FrequencyStageStats bcffs_frequency_stage(CloudState& state, const ControlInputs& in,
                                          const ControllerOptions& opts, ActionLog& log) {
  check_inputs(state, in);
  FrequencyStageStats stats;
  const int q_max = in.model().ladder().step_count();

  std::vector<PmId> active;
  for (std::size_t p = 0; p < state.pm_count(); ++p) {
    const PmId pm{static_cast<std::uint32_t>(p)};
    if (!state.hosted(pm).empty()) active.push_back(pm);
  }

  std::vector<double> mean_beta(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto hosted = state.hosted(active[i]);
    double sum = 0.0;
    for (VmId id : hosted) sum += in.vms[index_of(id)].beta;
    mean_beta[i] = sum / static_cast<double>(hosted.size());
  }

  std::vector<Action> records(active.size());
  std::vector<bool> removed(active.size(), false);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const PmId pm = active[i];
    Action& rec = records[i];
    rec = {.step = in.step, .kind = ActionKind::set_freq, .pm = pm,
           .from_q = state.freq_step(pm), .to_q = q_max};
    if (removed[i]) continue;
    ++stats.hosts_considered;

    int q = q_max;
    double revenue_cur = host_step_revenue(state, pm, q, in);
    double cost_cur = host_step_energy_cost(state, pm, q, in);
    double min_margin = std::numeric_limits<double>::infinity();
    while (q > 1) {
      const int candidate = q - 1;
      const double revenue_new = host_step_revenue(state, pm, candidate, in);
      const double cost_new = host_step_energy_cost(state, pm, candidate, in);
      const double revenue_loss = revenue_cur - revenue_new;
      const double en_savings = cost_cur - cost_new;
      if (!(en_savings > revenue_loss)) break;
      rec.predicted_saving += en_savings;
      rec.predicted_loss += revenue_loss;
      min_margin = std::min(min_margin, en_savings - revenue_loss);
      ++rec.decreases;
      revenue_cur = revenue_new;
      cost_cur = cost_new;
      q = candidate;
    }
    rec.to_q = q;

    if (rec.decreases > 0) {
      rec.min_margin = min_margin;
      ++stats.hosts_scaled;
    } else if (opts.prune) {
      const SiteConditions& here = in.conditions[index_of(pm)];
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        if (removed[j]) continue;
        const SiteConditions& there = in.conditions[index_of(active[j])];
        if (mean_beta[j] > mean_beta[i] && there.price < here.price && there.temp < here.temp) {
          removed[j] = true;
          stats.pruned.push_back(active[j]);
        }
      }
    }
  }

  for (std::size_t i = 0; i < active.size(); ++i) {
    Action& rec = records[i];
    state.set_freq_step(rec.pm, rec.to_q);
    if (rec.to_q != rec.from_q || rec.decreases > 0) log.push_back(rec);
  }
  return stats;
}

ControlPassResult run_control_pass(ControllerKind kind, CloudState& state,
                                   std::span<const VmId> pending, const ControlInputs& in,
                                   const ControllerOptions& opts, ActionLog& log) {
  ControlPassResult result;
  switch (kind) {
    case ControllerKind::bfd:
      result.deferred = bfd_baseline(state, pending, in, opts, log);
      break;
    case ControllerKind::bcf:
      result.deferred = bcf_migration_stage(state, pending, in, opts, log);
      break;
    case ControllerKind::bcffs:
      result.deferred = bcf_migration_stage(state, pending, in, opts, log);
      result.frequency = bcffs_frequency_stage(state, in, opts, log);
      break;
  }
  return result;
}

DecisionAudit audit_frequency_decisions(std::span<const Action> log) {
  DecisionAudit audit;
  for (const Action& a : log) {
    if (a.kind != ActionKind::set_freq || a.decreases == 0) continue;
    ++audit.records;
    audit.decreases += a.decreases;
    audit.predicted_saving += a.predicted_saving;
    audit.predicted_loss += a.predicted_loss;
    if (!(a.min_margin > 0.0) || !(a.predicted_saving > a.predicted_loss)) ++audit.violations;
  }
  return audit;
}

}  // namespace geocloud
