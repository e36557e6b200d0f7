#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geocloud {

using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (UTC). Throws InvariantViolation on malformed input.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Start of every synthetic trace.
inline constexpr Timestamp kDefaultTraceStart{std::chrono::sys_days{
    std::chrono::year{2015} / std::chrono::January / 1}};

/// A data-center site. Prices are in $/kWh, temperatures in degrees Celsius.
struct Location {
  std::string id;
  int timezone_offset_h = 0;
  double mean_price = 0.05;
  double mean_temp = 15.0;
  std::optional<std::filesystem::path> trace_file;
};

/// Hourly (or `step_h`) electricity price and outdoor temperature for one site.
struct GeotemporalTrace {
  std::string location;
  Timestamp start = kDefaultTraceStart;
  double step_h = 1.0;
  std::vector<double> prices;
  std::vector<double> temps;

  std::size_t size() const noexcept { return prices.size(); }

  /// Throws InvariantViolation unless lengths match and are >= 1, every
  /// price is positive and every temperature lies in [-40, 60].
  void validate() const;
};

/// Price and temperature seen by one site at one step.
struct SiteConditions {
  double price = 0.0;
  double temp = 0.0;
};

/// Partial PUE of the cooling subsystem at outdoor temperature `temp_c`.
/// Not clamped: cold temperatures yield values slightly below 1.
double ppue(double temp_c) noexcept;

/// IT power plus cooling overhead (W).
double total_power(double p_it_w, double temp_c) noexcept;

/// Rectangle-rule energy cost in $: step_h * sum_t (powers[t] / 1000) * prices[t].
/// Throws LengthMismatch on unequal series.
double energy_cost(std::span<const double> powers_w, std::span<const double> prices_per_kwh,
                   double step_h);

/// Cost in $ of a constant power draw over one step.
inline double step_energy_cost(double power_w, double price_per_kwh, double step_h) noexcept {
  return step_h * (power_w / 1000.0) * price_per_kwh;
}

enum class TraceMode { fixed, rtep };

std::string_view to_string(TraceMode mode) noexcept;
TraceMode parse_trace_mode(std::string_view name);

/// Shape of the synthetic price and temperature generator.
struct SynthParams {
  double price_amplitude = 0.30;  ///< fraction of mean_price
  double price_trough_hour = 4.0;  ///< local time of the daily minimum; peak 12 h later
  double price_noise = 0.05;       ///< Gaussian sigma as a fraction of mean_price
  double price_floor = 0.20;       ///< prices are clipped to >= floor * mean_price
  double temp_amplitude = 6.0;     ///< degrees C
  double temp_peak_hour = 15.0;    ///< local time of the daily maximum
  double temp_noise = 1.0;         ///< Gaussian sigma, degrees C
  double step_h = 1.0;             ///< sample spacing, hours
};

/// Deterministic synthetic trace starting at kDefaultTraceStart (00:00 UTC).
///
/// Fixed mode holds the price at mean_price; rtep mode follows a diurnal
/// sinusoid in local time plus clipped Gaussian noise. Temperatures are a
/// noisy diurnal sinusoid and are identical in both modes for a given seed.
GeotemporalTrace synth_trace(const Location& loc, int samples, TraceMode mode, std::uint64_t seed,
                             const SynthParams& params = {});

/// Reads a `timestamp,price_usd_per_kwh,temp_c` CSV with equally spaced rows.
GeotemporalTrace load_trace(const std::filesystem::path& path, std::string location_id = {});
void write_trace(const std::filesystem::path& path, const GeotemporalTrace& trace);

}  // namespace geocloud
