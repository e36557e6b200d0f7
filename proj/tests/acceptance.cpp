// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "geocloud/geotemporal.hpp"
#include "geocloud/power_model.hpp"
#include "geocloud/pricing.hpp"
#include "geocloud/report_io.hpp"
#include "geocloud/simulator.hpp"
#include "geocloud/surface_fit.hpp"
#include "oracles.hpp"

using namespace geocloud;

namespace {

constexpr int kSeeds = 20;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Verdict power_model_exactness() {
  const auto start = std::chrono::steady_clock::now();
  const auto model = PowerModel::arm();
  double worst = 0.0;
  int points = 0;
  for (int q = 1; q <= 11; ++q) {
    for (int c = 1; c <= 4; ++c) {
      worst = std::max(worst, oracle::rel_diff(model.active_power(q, c),
                                               oracle::surface(oracle::kArmSurface, q, c)));
      ++points;
    }
  }
  const double lo = model.active_power(1, 1), hi = model.active_power(11, 4);
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = worst <= 1e-12 && oracle::rel_diff(lo, 1.613628) <= 1e-12 &&
           oracle::rel_diff(hi, 17.258912) <= 1e-12 && elapsed < 1.0;
  v.detail = fmt("%d grid points, worst rel diff %.2e; P(1,1)=%.9g W, P(11,4)=%.9g W; %.3f s",
                 points, worst, lo, hi, elapsed);
  return v;
}

Verdict fit_round_trip() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<PowerSample> grid;
  for (int q = 1; q <= 11; ++q)
    for (int c = 1; c <= 4; ++c) grid.push_back({double(q), double(c), oracle::surface(oracle::kArmSurface, q, c)});
  const auto fit = fit_power_surface(grid);
  const auto& k = fit.coefficients;
  const auto& s = oracle::kArmSurface;
  const double err = std::max({std::abs(k.p00 - s.p00), std::abs(k.p10 - s.p10), std::abs(k.p01 - s.p01),
                               std::abs(k.p20 - s.p20), std::abs(k.p11 - s.p11), std::abs(k.p30 - s.p30),
                               std::abs(k.p21 - s.p21)});

  double worst_mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto noisy = grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    for (auto& p : noisy) p.power_w *= 1.0 + noise(rng);
    worst_mean = std::max(worst_mean, fit_power_surface(noisy).mean_relative_deviation);
  }
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = grid.size() == 44 && err <= 1e-6 && worst_mean <= 0.06 && elapsed < 1.0;
  v.detail = fmt("noiseless max coefficient error %.2e; +-5%% noise, 10 seeds, worst mean deviation "
                 "%.2f%%; %.3f s",
                 err, 100.0 * worst_mean, elapsed);
  return v;
}

Verdict pricing() {
  Verdict v;
  const auto intel = FrequencyLadder::intel();
  VmSpec base{VmId{0}, 1, 1, 1.0, 0, 1};
  const auto cs = PricingScheme::cloudsigma();
  const auto eh = PricingScheme::elastichosts();
  const double cs_price = vm_price(cs, base, intel.f_min(), intel);
  const double eh_price = vm_price(eh, base, intel.f_min(), intel);
  // Exact: the price is c_base + c_ram with no further rounding, and that sum
  // is the double nearest the published decimal.
  const auto nearest = [](double got, double decimal) {
    return std::abs(got - decimal) <= std::nextafter(decimal, 1.0) - decimal;
  };
  const bool bases = cs_price == cs.c_base + cs.c_ram && eh_price == eh.c_base + eh.c_ram &&
                     nearest(cs_price, 0.0085) && nearest(eh_price, 0.052);

  int invariance_cases = 0, invariance_failures = 0, mode_cases = 0, mode_failures = 0;
  for (const auto& ladder : {FrequencyLadder::arm(), FrequencyLadder::intel()}) {
    for (const auto& scheme : {cs, eh}) {
      for (int vcpus = 1; vcpus <= 2; ++vcpus) {
        for (int ram = 8; ram <= 16; ++ram) {
          VmSpec io{VmId{0}, vcpus, ram, 0.0, 0, 1};
          VmSpec cpu{VmId{0}, vcpus, ram, 1.0, 0, 1};
          const double top = vm_price(scheme, io, ladder.f_max(), ladder);
          auto perf = scheme;
          perf.mode = PricingMode::performance_based;
          for (int q = 1; q <= ladder.step_count(); ++q) {
            const double f = ladder.frequency(q);
            ++invariance_cases;
            if (vm_price(scheme, io, f, ladder) != top) ++invariance_failures;
            ++mode_cases;
            if (vm_price(scheme, cpu, f, ladder) != vm_price(perf, cpu, f, ladder)) ++mode_failures;
          }
        }
      }
    }
  }
  v.pass = bases && invariance_failures == 0 && mode_failures == 0;
  v.detail = fmt("CloudSigma %.17g, ElasticHosts %.17g; beta=0 invariance %d/%d; beta=1 mode "
                 "equality %d/%d",
                 cs_price, eh_price, invariance_cases - invariance_failures, invariance_cases,
                 mode_cases - mode_failures, mode_cases);
  return v;
}

Verdict energy_integration() {
  const std::vector<double> kw(10, 1000.0), price(10, 0.05);
  const double cost = energy_cost(kw, price, 1.0);

  oracle::Gen gen(4);
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 200));
    std::vector<double> p(n), e(n), scaled(n);
    const double a = gen.uniform(0.001, 1000.0), step = gen.uniform(0.05, 4.0);
    for (std::size_t t = 0; t < n; ++t) {
      p[t] = gen.uniform(0.0, 5000.0);
      e[t] = gen.uniform(0.005, 0.5);
      scaled[t] = a * p[t];
    }
    const double d = oracle::rel_diff(energy_cost(scaled, e, step), a * energy_cost(p, e, step));
    worst = std::max(worst, d);
    if (d > 1e-12) ++failures;
  }
  Verdict v;
  v.pass = cost == 0.5 && failures == 0;
  v.detail = fmt("1 kW x 0.05 $/kWh x 10 h = $%.17g; linearity 1000 cases, worst rel diff %.2e",
                 cost, worst);
  return v;
}

// ---------------------------------------------------------------------------

struct Pair {
  Aggregates bcf;
  Aggregates bcffs;
  DecisionAudit audit;
  ActionLog log;
};

Pair bcf_vs_bcffs(const Scenario& scenario) {
  const ControllerKind kinds[] = {ControllerKind::bcf, ControllerKind::bcffs};
  auto cmp = compare(scenario, kinds);
  return {cmp.entry(ControllerKind::bcf).totals, cmp.entry(ControllerKind::bcffs).totals,
          cmp.entry(ControllerKind::bcffs).audit, std::move(cmp.runs[1].log)};
}

// Energy-cost saving of BCFFS relative to BCF, as a fraction of BCF's cost.
double saving(const Pair& p) { return (p.bcf.total_cost - p.bcffs.total_cost) / p.bcf.total_cost; }

Scenario desk_scenario(std::uint64_t seed) {
  Scenario s;  // 200 PMs, 200 VMs, 168 steps, ARM, CloudSigma perceived, rtep
  s.seed = seed;
  return s;
}

Verdict controller_guarantee() {
  const auto start = std::chrono::steady_clock::now();
  long long decreases = 0, violations = 0, step_violations = 0, cost_failures = 0;
  double worst_gap = 0.0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Pair p = bcf_vs_bcffs(desk_scenario(static_cast<std::uint64_t>(seed)));
    decreases += p.audit.decreases;
    violations += p.audit.violations;
    // Per-step sums of predicted savings and losses, straight from the log.
    std::vector<double> step_saving(168, 0.0), step_loss(168, 0.0);
    for (const Action& a : p.log) {
      if (a.kind != ActionKind::set_freq || a.decreases == 0) continue;
      if (!(a.min_margin > 0.0)) ++violations;
      step_saving[static_cast<std::size_t>(a.step)] += a.predicted_saving;
      step_loss[static_cast<std::size_t>(a.step)] += a.predicted_loss;
    }
    for (std::size_t t = 0; t < step_saving.size(); ++t) {
      if (step_saving[t] < step_loss[t]) ++step_violations;
    }
    if (!(p.bcffs.total_cost <= p.bcf.total_cost)) ++cost_failures;
    worst_gap = std::max(worst_gap, p.bcffs.total_cost / p.bcf.total_cost);
  }
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = violations == 0 && step_violations == 0 && cost_failures == 0 && decreases > 0 &&
           elapsed < 300.0;
  v.detail = fmt("%d seeds: %lld accepted decreases, %lld margin violations, %lld step-sum "
                 "violations, BCFFS<=BCF cost on %lld/%d seeds (worst ratio %.4f); %.1f s",
                 kSeeds, decreases, violations, step_violations, kSeeds - cost_failures, kSeeds,
                 worst_gap, elapsed);
  return v;
}

Verdict directional_reproduction() {
  int positive = 0, drop_ok = 0, eh_ok = 0, perf_ok = 0, fixed_ok = 0;
  double sum_cs = 0, sum_eh = 0, sum_perf = 0, sum_fixed = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Scenario base = desk_scenario(static_cast<std::uint64_t>(seed));
    const Pair cs = bcf_vs_bcffs(base);

    Scenario eh_s = base;
    eh_s.pricing = scaled_for(PricingScheme::elastichosts(), Architecture::arm);
    const Pair eh = bcf_vs_bcffs(eh_s);

    Scenario perf_s = base;
    perf_s.pricing.mode = PricingMode::performance_based;
    const Pair perf = bcf_vs_bcffs(perf_s);

    Scenario fixed_s = base;
    fixed_s.trace_mode = TraceMode::fixed;
    const Pair fixed = bcf_vs_bcffs(fixed_s);

    const double dollars = cs.bcf.total_cost - cs.bcffs.total_cost;
    const double drop = cs.bcf.service_revenue - cs.bcffs.service_revenue;
    if (saving(cs) > 0.0) ++positive;
    if (drop <= dollars) ++drop_ok;
    if (saving(eh) < saving(cs)) ++eh_ok;
    if (saving(perf) <= saving(cs)) ++perf_ok;
    if (saving(fixed) <= saving(cs)) ++fixed_ok;
    sum_cs += saving(cs);
    sum_eh += saving(eh);
    sum_perf += saving(perf);
    sum_fixed += saving(fixed);
  }
  const auto mean = [](double s) { return 100.0 * s / kSeeds; };
  Verdict v;
  v.pass = positive == kSeeds && drop_ok == kSeeds && eh_ok == kSeeds && perf_ok == kSeeds &&
           fixed_ok == kSeeds;
  v.detail = fmt("seeds passing: saving>0 %d/%d, revenue drop<=saving %d/%d, ElasticHosts<CloudSigma "
                 "%d/%d, performance<=perceived %d/%d, fixed<=rtep %d/%d; mean saving vs BCF: "
                 "CloudSigma %.2f%%, ElasticHosts %.2f%%, performance-based %.2f%%, fixed %.2f%%",
                 positive, kSeeds, drop_ok, kSeeds, eh_ok, kSeeds, perf_ok, kSeeds, fixed_ok, kSeeds,
                 mean(sum_cs), mean(sum_eh), mean(sum_perf), mean(sum_fixed));
  return v;
}

Verdict beta_sweep() {
  const auto start = std::chrono::steady_clock::now();
  const double betas[] = {0.0, 0.1, 0.2, 0.3, 0.4};
  double sums[5] = {};
  int monotone = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    double s[5];
    for (int i = 0; i < 5; ++i) {
      Scenario sc = desk_scenario(static_cast<std::uint64_t>(seed));
      sc.betas = FixedBeta{betas[i]};
      s[i] = saving(bcf_vs_bcffs(sc));
      sums[i] += s[i];
    }
    if (s[2] >= s[3] && s[3] >= s[4]) ++monotone;
  }
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = monotone == kSeeds && elapsed < 300.0;
  v.detail = fmt("non-increasing for beta>=0.2 on %d/%d seeds; mean saving vs BCF at beta "
                 "0.0..0.4: %.2f%% %.2f%% %.2f%% %.2f%% %.2f%%; %.1f s",
                 monotone, kSeeds, 100 * sums[0] / kSeeds, 100 * sums[1] / kSeeds,
                 100 * sums[2] / kSeeds, 100 * sums[3] / kSeeds, 100 * sums[4] / kSeeds, elapsed);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdict determinism() {
  std::vector<Scenario> scenarios;
  for (auto kind : {ControllerKind::bfd, ControllerKind::bcf, ControllerKind::bcffs}) {
    Scenario s = desk_scenario(3);
    s.controller = kind;
    scenarios.push_back(s);
  }
  Scenario fixed = desk_scenario(8);
  fixed.trace_mode = TraceMode::fixed;
  fixed.betas = FixedBeta{0.2};
  scenarios.push_back(fixed);
  Scenario intel = desk_scenario(5);
  intel.architecture = Architecture::intel;
  intel.power_models = {PowerModel::intel()};
  intel.pricing = scaled_for(PricingScheme::elastichosts(), Architecture::intel);
  scenarios.push_back(intel);

  const auto root = std::filesystem::temp_directory_path() / "geocloud_acceptance_determinism";
  std::filesystem::remove_all(root);
  int files = 0, identical = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (const char* copy : {"a", "b"}) {
      write_run_outputs(root / std::to_string(i) / copy, scenarios[i], run(scenarios[i]));
    }
    for (const char* name : {"report.json", "steps.csv", "histogram.csv"}) {
      ++files;
      const auto a = slurp(root / std::to_string(i) / "a" / name);
      if (!a.empty() && a == slurp(root / std::to_string(i) / "b" / name)) ++identical;
    }
  }
  const ControllerKind all[] = {ControllerKind::bfd, ControllerKind::bcf, ControllerKind::bcffs};
  for (const char* copy : {"a", "b"}) {
    write_comparison_outputs(root / "compare" / copy, scenarios[0], compare(scenarios[0], all));
  }
  for (const char* name : {"comparison.json", "comparison.csv", "steps_bcffs.csv", "histogram_bfd.csv"}) {
    ++files;
    const auto a = slurp(root / "compare" / "a" / name);
    if (!a.empty() && a == slurp(root / "compare" / "b" / name)) ++identical;
  }
  std::filesystem::remove_all(root);
  Verdict v;
  v.pass = identical == files;
  v.detail = fmt("%d/%d output files byte-identical across repeated runs (%zu scenarios + compare)",
                 identical, files, scenarios.size());
  return v;
}

Verdict scale_check() {
  Scenario s = desk_scenario(1);
  s.n_pms = 2000;
  s.n_vms = 2000;
  s.controller = ControllerKind::bcffs;
  const auto start = std::chrono::steady_clock::now();
  const auto r = run(s);
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = elapsed < 600.0 && r.report.steps.size() == 168;
  v.detail = fmt("2000 PMs / 2000 VMs / 168 steps, bcffs: %.2f s on %u hardware threads; total cost "
                 "$%.2f, revenue $%.2f",
                 elapsed, std::thread::hardware_concurrency(), r.report.totals.total_cost,
                 r.report.totals.service_revenue);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
  };
  const Criterion criteria[] = {
      {"power-model exactness", power_model_exactness},
      {"fit round-trip", fit_round_trip},
      {"pricing", pricing},
      {"energy integration", energy_integration},
      {"controller guarantee", controller_guarantee},
      {"directional reproduction", directional_reproduction},
      {"beta-sweep monotonicity", beta_sweep},
      {"determinism", determinism},
      {"scale check", scale_check},
  };

  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed;
}
