#include "geocloud/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <unordered_map>

#include "geocloud/error.hpp"

namespace geocloud {

std::vector<Location> default_locations() {
  return {
      {"the-dalles", -8, 0.040, 12.0, std::nullopt},
      {"council-bluffs", -6, 0.045, 10.0, std::nullopt},
      {"lenoir", -5, 0.050, 15.0, std::nullopt},
      {"dublin", 0, 0.095, 10.0, std::nullopt},
      {"st-ghislain", 1, 0.085, 11.0, std::nullopt},
      {"hamina", 2, 0.065, 5.0, std::nullopt},
  };
}

const PowerModel& Scenario::power_model() const {
  for (const auto& m : power_models) {
    if (m.architecture() == architecture) return m;
  }
  throw ConfigError("no power model profile for architecture '" +
                    std::string(to_string(architecture)) + "'");
}

void Scenario::validate() const {
  if (locations.empty()) throw ConfigError("at least one location is required");
  std::set<std::string> ids;
  for (const auto& loc : locations) {
    if (loc.id.empty()) throw ConfigError("location id must not be empty");
    if (!ids.insert(loc.id).second) throw ConfigError("duplicate location id '" + loc.id + "'");
    if (!(loc.mean_price > 0.0)) {
      throw ConfigError("location '" + loc.id + "' mean_price must be positive");
    }
  }
  (void)power_model();
  if (horizon_steps < 1) throw ConfigError("horizon_steps must be >= 1");
  if (!(step_h > 0.0)) throw ConfigError("step_h must be positive");
  if (!(options.underutil_threshold >= 0.0 && options.underutil_threshold <= 1.0)) {
    throw ConfigError("underutil_threshold must be within [0, 1]");
  }
  try {
    pricing.validate();
  } catch (const InvariantViolation& e) {
    throw ConfigError(e.what());
  }
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaDistribution>) {
          if (!(m.rate > 0.0)) throw ConfigError("beta rate must be positive");
        } else if constexpr (std::is_same_v<T, FixedBeta>) {
          if (!(m.beta >= 0.0 && m.beta <= 1.0)) throw ConfigError("fixed beta outside [0, 1]");
        } else {
          if (m.values.empty()) throw ConfigError("empirical beta list is empty");
          for (double b : m.values) {
            if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("empirical beta outside [0, 1]");
          }
        }
      },
      betas);
}

World materialize(const Scenario& scenario) {
  scenario.validate();
  World world;

  std::vector<std::string> ids;
  for (const auto& loc : scenario.locations) ids.push_back(loc.id);
  Rng fleet_rng = make_rng(scenario.seed, streams::fleet);
  world.fleet = gen_fleet(scenario.n_pms, ids, scenario.architecture, fleet_rng);

  Rng request_rng = make_rng(scenario.seed, streams::requests);
  world.vms = gen_requests(scenario.n_vms, scenario.horizon_steps, scenario.betas, request_rng);

  SynthParams synth = scenario.synth;
  synth.step_h = scenario.step_h;
  for (const auto& loc : scenario.locations) {
    if (loc.trace_file) {
      if (!std::filesystem::exists(*loc.trace_file)) {
        throw ConfigError("trace file not found: " + loc.trace_file->string());
      }
      world.traces.push_back(load_trace(*loc.trace_file, loc.id));
    } else {
      world.traces.push_back(
          synth_trace(loc, scenario.horizon_steps, scenario.trace_mode, scenario.seed, synth));
    }
  }
  return world;
}

int BetaFreqHistogram::beta_bin(double beta) {
  return std::clamp(static_cast<int>(std::floor(beta * kBetaBins)), 0, kBetaBins - 1);
}

std::uint64_t BetaFreqHistogram::at(int bin, int q) const {
  return counts.at(static_cast<std::size_t>(bin * ladder.step_count() + (q - 1)));
}

std::uint64_t BetaFreqHistogram::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

namespace {

struct Prepared {
  std::vector<std::size_t> pm_location;  // location index per PM
  std::vector<std::vector<VmId>> boots;
  std::vector<std::vector<VmId>> expiries;
};

Prepared prepare(const Scenario& scenario, const World& world) {
  scenario.validate();
  const auto horizon = static_cast<std::size_t>(scenario.horizon_steps);
  if (world.traces.size() != scenario.locations.size()) {
    throw ConfigError("one trace per location is required");
  }
  for (std::size_t i = 0; i < world.traces.size(); ++i) {
    const auto& trace = world.traces[i];
    trace.validate();
    if (trace.size() < horizon) {
      throw ConfigError("trace for '" + scenario.locations[i].id + "' has " +
                        std::to_string(trace.size()) + " steps; horizon needs " +
                        std::to_string(horizon));
    }
    if (std::abs(trace.step_h - scenario.step_h) > 1e-9) {
      throw ConfigError("trace for '" + scenario.locations[i].id +
                        "' does not match the scenario step");
    }
  }

  std::unordered_map<std::string, std::size_t> loc_index;
  for (std::size_t i = 0; i < scenario.locations.size(); ++i) loc_index[scenario.locations[i].id] = i;

  const PowerModel& model = scenario.power_model();
  Prepared prep;
  for (std::size_t p = 0; p < world.fleet.size(); ++p) {
    const PmSpec& pm = world.fleet[p];
    if (index_of(pm.id) != p) throw ConfigError("PM ids must equal their index");
    pm.validate();
    if (pm.architecture != scenario.architecture) {
      throw ConfigError("PM " + std::to_string(p) + " architecture differs from the scenario");
    }
    if (pm.cores > model.core_count_max()) {
      throw ConfigError("PM " + std::to_string(p) + " has more cores than the power model");
    }
    auto it = loc_index.find(pm.location);
    if (it == loc_index.end()) throw ConfigError("PM references unknown location '" + pm.location + "'");
    prep.pm_location.push_back(it->second);
  }

  prep.boots.resize(horizon);
  prep.expiries.resize(horizon + 1);
  for (std::size_t v = 0; v < world.vms.size(); ++v) {
    const VmSpec& vm = world.vms[v];
    if (index_of(vm.id) != v) throw ConfigError("VM ids must equal their index");
    vm.validate();
    if (static_cast<std::size_t>(vm.boot_t) < horizon) {
      prep.boots[static_cast<std::size_t>(vm.boot_t)].push_back(vm.id);
    }
    if (static_cast<std::size_t>(vm.delete_t) < horizon) {
      prep.expiries[static_cast<std::size_t>(vm.delete_t)].push_back(vm.id);
    }
  }
  return prep;
}

void expire(CloudState& state, const World& world, std::span<const VmId> ids) {
  for (VmId id : ids) {
    if (state.host_of(id)) state.release(world.vms[index_of(id)]);
  }
}

}  // namespace

CloudState initial_state(const Scenario& scenario, const World& world) {
  const int q_max = scenario.power_model().ladder().step_count();
  const std::vector<int> steps(world.fleet.size(), q_max);
  return CloudState(world.fleet, world.vms.size(), steps);
}

RunResult run(const Scenario& scenario, const World& world, const RunOptions& options) {
  const Prepared prep = prepare(scenario, world);
  const PowerModel& model = scenario.power_model();
  const FrequencyLadder& ladder = model.ladder();
  const double step_h = scenario.step_h;

  RunResult result;
  result.report.controller = std::string(to_string(scenario.controller));
  result.report.synthetic_power_model = model.synthetic();
  result.histogram.ladder = ladder;
  result.histogram.counts.assign(
      static_cast<std::size_t>(BetaFreqHistogram::kBetaBins * ladder.step_count()), 0);

  CloudState state = initial_state(scenario, world);
  std::vector<VmId> pending;
  std::vector<SiteConditions> conditions(world.fleet.size());

  for (int t = 0; t < scenario.horizon_steps; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    expire(state, world, prep.expiries[ts]);
    std::erase_if(pending, [&](VmId id) { return world.vms[index_of(id)].delete_t <= t; });
    pending.insert(pending.end(), prep.boots[ts].begin(), prep.boots[ts].end());

    for (std::size_t p = 0; p < world.fleet.size(); ++p) {
      const auto& trace = world.traces[prep.pm_location[p]];
      conditions[p] = {trace.prices[ts], trace.temps[ts]};
    }
    const ControlInputs in{.step = t,
                           .step_h = step_h,
                           .fleet = world.fleet,
                           .vms = world.vms,
                           .conditions = conditions,
                           .power_model = &model,
                           .pricing = &scenario.pricing};

    const std::size_t log_start = result.log.size();
    auto pass = run_control_pass(scenario.controller, state, pending, in, scenario.options, result.log);
    pending = std::move(pass.deferred);
    result.pruning.pruned += static_cast<long long>(pass.frequency.pruned.size());
    result.pruning.hosts_considered += pass.frequency.hosts_considered;
    result.pruning.hosts_scaled += pass.frequency.hosts_scaled;

    StepRecord rec;
    rec.step = t;
    rec.deferred = static_cast<int>(pending.size());
    for (std::size_t i = log_start; i < result.log.size(); ++i) {
      if (result.log[i].kind == ActionKind::migrate) ++rec.migrations;
    }

    double freq_sum = 0.0;
    for (std::size_t p = 0; p < world.fleet.size(); ++p) {
      const PmId pm{static_cast<std::uint32_t>(p)};
      if (state.hosted(pm).empty()) continue;
      const int q = state.freq_step(pm);
      const double p_it = host_it_power(state, pm, q, in);
      const double p_tot = total_power(p_it, conditions[p].temp);
      const double it_cost = step_energy_cost(p_it, conditions[p].price, step_h);
      const double cost = step_energy_cost(p_tot, conditions[p].price, step_h);
      rec.it_power_w += p_it;
      rec.total_power_w += p_tot;
      rec.it_cost += it_cost;
      rec.total_cost += cost;
      rec.revenue += host_step_revenue(state, pm, q, in);
      ++rec.active_pms;
      freq_sum += ladder.frequency(q);
      result.ledger.push_back({pm, t, p_it, p_tot, cost, prep.pm_location[p]});

      for (VmId id : state.hosted(pm)) {
        const int bin = BetaFreqHistogram::beta_bin(world.vms[index_of(id)].beta);
        ++result.histogram.counts[static_cast<std::size_t>(bin * ladder.step_count() + (q - 1))];
      }
    }
    if (rec.active_pms > 0) rec.mean_freq_ghz = freq_sum / rec.active_pms;

    auto& totals = result.report.totals;
    totals.it_energy_kwh += rec.it_power_w / 1000.0 * step_h;
    totals.total_energy_kwh += rec.total_power_w / 1000.0 * step_h;
    totals.it_cost += rec.it_cost;
    totals.total_cost += rec.total_cost;
    totals.service_revenue += rec.revenue;
    totals.migrations += rec.migrations;
    totals.deferrals += rec.deferred;
    result.report.steps.push_back(rec);

    if (options.keep_states) result.states.push_back(state);
  }
  return result;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  return run(scenario, materialize(scenario), options);
}

std::vector<CloudState> replay(const Scenario& scenario, const World& world,
                               std::span<const Action> log) {
  const Prepared prep = prepare(scenario, world);
  CloudState state = initial_state(scenario, world);
  std::vector<CloudState> states;
  states.reserve(static_cast<std::size_t>(scenario.horizon_steps));

  auto it = log.begin();
  for (int t = 0; t < scenario.horizon_steps; ++t) {
    expire(state, world, prep.expiries[static_cast<std::size_t>(t)]);
    auto end = std::find_if(it, log.end(), [t](const Action& a) { return a.step != t; });
    apply_pass(state, std::span<const Action>(it, end), world.vms);
    it = end;
    states.push_back(state);
  }
  if (it != log.end()) throw InvariantViolation("action log has records beyond the horizon");
  return states;
}

BetaFreqHistogram beta_freq_histogram(const Scenario& scenario, const World& world,
                                      std::span<const CloudState> states) {
  BetaFreqHistogram hist;
  hist.ladder = scenario.power_model().ladder();
  const int steps = hist.ladder.step_count();
  hist.counts.assign(static_cast<std::size_t>(BetaFreqHistogram::kBetaBins * steps), 0);
  for (const CloudState& state : states) {
    for (const auto& [vm, pm] : state.allocation()) {
      const int bin = BetaFreqHistogram::beta_bin(world.vms[index_of(vm)].beta);
      ++hist.counts[static_cast<std::size_t>(bin * steps + (state.freq_step(pm) - 1))];
    }
  }
  return hist;
}

namespace {

double ratio(double value, double base) {
  if (base == 0.0) return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return value / base;
}

Aggregates normalize(const Aggregates& a, const Aggregates& base) {
  Aggregates n;
  n.it_energy_kwh = ratio(a.it_energy_kwh, base.it_energy_kwh);
  n.it_cost = ratio(a.it_cost, base.it_cost);
  n.total_energy_kwh = ratio(a.total_energy_kwh, base.total_energy_kwh);
  n.total_cost = ratio(a.total_cost, base.total_cost);
  n.service_revenue = ratio(a.service_revenue, base.service_revenue);
  n.migrations = a.migrations;
  n.deferrals = a.deferrals;
  return n;
}

}  // namespace

const ComparisonEntry& ComparisonReport::entry(ControllerKind kind) const {
  for (const auto& e : entries) {
    if (e.controller == kind) return e;
  }
  throw InvariantViolation("controller '" + std::string(to_string(kind)) + "' was not compared");
}

const RunResult& ComparisonReport::result(ControllerKind kind) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].controller == kind) return runs[i];
  }
  throw InvariantViolation("controller '" + std::string(to_string(kind)) + "' was not compared");
}

ComparisonReport compare(const Scenario& scenario, std::span<const ControllerKind> controllers) {
  if (controllers.empty()) throw ConfigError("compare needs at least one controller");
  const World world = materialize(scenario);

  std::vector<std::future<RunResult>> futures;
  for (ControllerKind kind : controllers) {
    Scenario variant = scenario;
    variant.controller = kind;
    futures.push_back(std::async(std::launch::async, [variant = std::move(variant), &world] {
      return run(variant, world);
    }));
  }

  ComparisonReport report;
  for (auto& f : futures) report.runs.push_back(f.get());

  const auto base_it = std::find(controllers.begin(), controllers.end(), ControllerKind::bfd);
  const std::size_t base = base_it == controllers.end()
                               ? 0
                               : static_cast<std::size_t>(base_it - controllers.begin());
  report.baseline = controllers[base];
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    ComparisonEntry e;
    e.controller = controllers[i];
    e.totals = report.runs[i].report.totals;
    e.normalized = normalize(e.totals, report.runs[base].report.totals);
    e.audit = audit_frequency_decisions(report.runs[i].log);
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace geocloud
