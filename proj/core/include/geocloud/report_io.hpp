#pragma once

#include <filesystem>
#include <string>

#include "geocloud/simulator.hpp"

namespace geocloud {

inline constexpr std::string_view kReportSchema = "geocloud.report/1";
inline constexpr std::string_view kComparisonSchema = "geocloud.comparison/1";

/// Aggregates, run metadata and the decision audit as JSON.
std::string report_json(const Scenario& scenario, const RunResult& result);
/// Per-step series, one row per step.
std::string steps_csv(const SimulationReport& report);
/// Long-format (beta, frequency) occurrence counts.
std::string histogram_csv(const BetaFreqHistogram& hist);

std::string comparison_json(const Scenario& scenario, const ComparisonReport& report);
/// Metric rows with one absolute and one normalized column per controller.
std::string comparison_csv(const ComparisonReport& report);
/// Human-readable table in the layout of the aggregated-results tables.
std::string comparison_table(const ComparisonReport& report);

/// Writes report.json, steps.csv and histogram.csv into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                       const RunResult& result);
/// Writes comparison.json, comparison.csv and per-controller step series.
void write_comparison_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                              const ComparisonReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace geocloud
