#include "geocloud/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "geocloud/config.hpp"
#include "geocloud/error.hpp"

namespace geocloud {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json aggregates_json(const Aggregates& a) {
  return {{"it_energy_kwh", a.it_energy_kwh},       {"it_cost_usd", a.it_cost},
          {"total_energy_kwh", a.total_energy_kwh}, {"total_cost_usd", a.total_cost},
          {"service_revenue_usd", a.service_revenue}, {"migrations", a.migrations},
          {"deferrals", a.deferrals}};
}

json audit_json(const DecisionAudit& a) {
  return {{"accepted_decreases", a.decreases},
          {"scaled_records", a.records},
          {"violations", a.violations},
          {"predicted_saving_usd", a.predicted_saving},
          {"predicted_revenue_loss_usd", a.predicted_loss}};
}

json scenario_json(const Scenario& scenario) {
  return json::parse(dump_config(Config{scenario, {}}));
}

struct MetricRow {
  const char* key;
  const char* label;
  double Aggregates::*field;
};

constexpr MetricRow kMetrics[] = {
    {"it_energy_kwh", "IT energy (kWh)", &Aggregates::it_energy_kwh},
    {"it_cost_usd", "IT cost ($)", &Aggregates::it_cost},
    {"total_energy_kwh", "Total energy (kWh)", &Aggregates::total_energy_kwh},
    {"total_cost_usd", "Total cost ($)", &Aggregates::total_cost},
    {"service_revenue_usd", "Service revenue ($)", &Aggregates::service_revenue},
};

}  // namespace

std::string report_json(const Scenario& scenario, const RunResult& result) {
  json root;
  root["schema"] = kReportSchema;
  root["controller"] = result.report.controller;
  root["synthetic_power_model"] = result.report.synthetic_power_model;
  root["aggregates"] = aggregates_json(result.report.totals);
  root["frequency_decisions"] = audit_json(audit_frequency_decisions(result.log));
  root["pruning"] = {{"pruned_hosts", result.pruning.pruned},
                     {"hosts_considered", result.pruning.hosts_considered},
                     {"hosts_scaled", result.pruning.hosts_scaled}};
  root["steps"] = result.report.steps.size();
  root["scenario"] = scenario_json(scenario);
  return root.dump(2) + "\n";
}

std::string steps_csv(const SimulationReport& report) {
  std::string out =
      "step,it_power_w,total_power_w,it_cost_usd,total_cost_usd,revenue_usd,migrations,"
      "active_pms,deferred,mean_freq_ghz\n";
  for (const auto& s : report.steps) {
    out += std::to_string(s.step) + ',' + num(s.it_power_w) + ',' + num(s.total_power_w) + ',' +
           num(s.it_cost) + ',' + num(s.total_cost) + ',' + num(s.revenue) + ',' +
           std::to_string(s.migrations) + ',' + std::to_string(s.active_pms) + ',' +
           std::to_string(s.deferred) + ',' + num(s.mean_freq_ghz) + '\n';
  }
  return out;
}

std::string histogram_csv(const BetaFreqHistogram& hist) {
  std::string out = "beta_lo,beta_hi,freq_ghz,count\n";
  const int steps = hist.ladder.step_count();
  for (int b = 0; b < BetaFreqHistogram::kBetaBins; ++b) {
    const double lo = static_cast<double>(b) / BetaFreqHistogram::kBetaBins;
    const double hi = static_cast<double>(b + 1) / BetaFreqHistogram::kBetaBins;
    for (int q = 1; q <= steps; ++q) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.3f,", lo, hi, hist.ladder.frequency(q));
      out += buf + std::to_string(hist.at(b, q)) + '\n';
    }
  }
  return out;
}

std::string comparison_json(const Scenario& scenario, const ComparisonReport& report) {
  json root;
  root["schema"] = kComparisonSchema;
  root["baseline"] = to_string(report.baseline);
  root["controllers"] = json::array();
  for (const auto& e : report.entries) {
    root["controllers"].push_back({{"controller", to_string(e.controller)},
                                   {"absolute", aggregates_json(e.totals)},
                                   {"normalized", aggregates_json(e.normalized)},
                                   {"frequency_decisions", audit_json(e.audit)}});
  }
  root["scenario"] = scenario_json(scenario);
  return root.dump(2) + "\n";
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "metric";
  for (const auto& e : report.entries) out += "," + std::string(to_string(e.controller));
  for (const auto& e : report.entries) out += "," + std::string(to_string(e.controller)) + "_normalized";
  out += '\n';
  for (const auto& m : kMetrics) {
    out += m.key;
    for (const auto& e : report.entries) out += ',' + num(e.totals.*m.field);
    for (const auto& e : report.entries) out += ',' + num(e.normalized.*m.field);
    out += '\n';
  }
  return out;
}

std::string comparison_table(const ComparisonReport& report) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-22s", "");
  out += buf;
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof buf, "%14s", std::string(to_string(e.controller)).c_str());
    out += buf;
  }
  out += '\n';
  for (const auto& m : kMetrics) {
    std::snprintf(buf, sizeof buf, "%-22s", m.label);
    out += buf;
    for (const auto& e : report.entries) {
      std::snprintf(buf, sizeof buf, "%14.4f", e.totals.*m.field);
      out += buf;
    }
    out += '\n';
  }
  out += "\nnormalized to " + std::string(to_string(report.baseline)) + ":\n";
  for (const auto& m : kMetrics) {
    std::snprintf(buf, sizeof buf, "%-22s", m.label);
    out += buf;
    for (const auto& e : report.entries) {
      std::snprintf(buf, sizeof buf, "%14.4f", e.normalized.*m.field);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_run_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                       const RunResult& result) {
  write_text(dir / "report.json", report_json(scenario, result));
  write_text(dir / "steps.csv", steps_csv(result.report));
  write_text(dir / "histogram.csv", histogram_csv(result.histogram));
}

void write_comparison_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                              const ComparisonReport& report) {
  write_text(dir / "comparison.json", comparison_json(scenario, report));
  write_text(dir / "comparison.csv", comparison_csv(report));
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const std::string name(to_string(report.entries[i].controller));
    write_text(dir / ("steps_" + name + ".csv"), steps_csv(report.runs[i].report));
    write_text(dir / ("histogram_" + name + ".csv"), histogram_csv(report.runs[i].histogram));
  }
}

}  // namespace geocloud
