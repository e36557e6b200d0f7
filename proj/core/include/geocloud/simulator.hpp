#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geocloud/cloud_state.hpp"
#include "geocloud/controllers.hpp"
#include "geocloud/geotemporal.hpp"
#include "geocloud/power_model.hpp"
#include "geocloud/pricing.hpp"
#include "geocloud/workload.hpp"

namespace geocloud {

/// The six default sites (three US, three European).
std::vector<Location> default_locations();

/// Parameters of one simulated deployment. Everything random is derived
/// from `seed`, so a scenario fully determines its run.
struct Scenario {
  std::vector<Location> locations = default_locations();
  Architecture architecture = Architecture::arm;
  /// Profiles by architecture; the one matching `architecture` is used.
  std::vector<PowerModel> power_models{PowerModel::arm()};
  std::size_t n_pms = 200;
  std::size_t n_vms = 200;
  BetaModel betas = BetaDistribution{};
  PricingScheme pricing = scaled_for(PricingScheme::cloudsigma(), Architecture::arm);
  TraceMode trace_mode = TraceMode::rtep;
  SynthParams synth;
  ControllerKind controller = ControllerKind::bcffs;
  ControllerOptions options;
  int horizon_steps = 168;
  double step_h = 1.0;
  std::uint64_t seed = 1;

  const PowerModel& power_model() const;
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Concrete inputs of a run: fleet, request stream and one trace per location.
struct World {
  std::vector<PmSpec> fleet;
  std::vector<VmSpec> vms;
  std::vector<GeotemporalTrace> traces;  ///< aligned with the scenario's locations
};

/// Generates (or loads) the fleet, requests and traces for a scenario.
World materialize(const Scenario& scenario);

struct StepRecord {
  int step = 0;
  double it_power_w = 0.0;
  double total_power_w = 0.0;
  double it_cost = 0.0;
  double total_cost = 0.0;
  double revenue = 0.0;
  int migrations = 0;
  int active_pms = 0;
  int deferred = 0;
  double mean_freq_ghz = 0.0;  ///< over active PMs; 0 when none
};

struct Aggregates {
  double it_energy_kwh = 0.0;
  double it_cost = 0.0;
  double total_energy_kwh = 0.0;
  double total_cost = 0.0;
  double service_revenue = 0.0;
  long long migrations = 0;
  long long deferrals = 0;
};

struct EnergyLedgerEntry {
  PmId pm{};
  int step = 0;
  double p_it_w = 0.0;
  double p_tot_w = 0.0;
  double cost = 0.0;
  std::size_t location = 0;  ///< index into the scenario's locations
};

/// Occurrences of (VM beta, host frequency) over every step and allocated VM.
struct BetaFreqHistogram {
  static constexpr int kBetaBins = 20;

  FrequencyLadder ladder = FrequencyLadder::arm();
  /// counts[beta_bin * ladder.step_count() + (q - 1)]
  std::vector<std::uint64_t> counts;

  static int beta_bin(double beta);
  std::uint64_t at(int beta_bin, int q) const;
  std::uint64_t total() const;
};

struct SimulationReport {
  std::string controller;
  std::vector<StepRecord> steps;
  Aggregates totals;
  bool synthetic_power_model = false;
};

struct PruningStats {
  long long pruned = 0;
  long long hosts_considered = 0;
  long long hosts_scaled = 0;
};

struct RunResult {
  SimulationReport report;
  ActionLog log;
  std::vector<EnergyLedgerEntry> ledger;
  BetaFreqHistogram histogram;
  PruningStats pruning;
  /// State after the controller pass of every step, when requested.
  std::vector<CloudState> states;
};

struct RunOptions {
  bool keep_states = false;
};

/// Runs the hourly timeline. Per step: expire VMs whose delete_t is reached,
/// admit boots, invoke the controller, then account power, cost and revenue.
RunResult run(const Scenario& scenario, const World& world, const RunOptions& options = {});
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// Initial state of a run: every PM inactive at its highest frequency.
CloudState initial_state(const Scenario& scenario, const World& world);

/// Rebuilds the post-control state of every step from the action log.
std::vector<CloudState> replay(const Scenario& scenario, const World& world,
                               std::span<const Action> log);

/// Counts (beta, frequency) pairs over replayed states.
BetaFreqHistogram beta_freq_histogram(const Scenario& scenario, const World& world,
                                      std::span<const CloudState> states);

struct ComparisonEntry {
  ControllerKind controller = ControllerKind::bfd;
  Aggregates totals;
  Aggregates normalized;  ///< each metric divided by the baseline's
  DecisionAudit audit;
};

struct ComparisonReport {
  ControllerKind baseline = ControllerKind::bfd;
  std::vector<ComparisonEntry> entries;
  std::vector<RunResult> runs;

  const ComparisonEntry& entry(ControllerKind kind) const;
  const RunResult& result(ControllerKind kind) const;
};

/// Runs every controller on the same materialized world, concurrently.
/// Metrics are normalized to BFD when present, otherwise to the first controller.
ComparisonReport compare(const Scenario& scenario, std::span<const ControllerKind> controllers);

}  // namespace geocloud
