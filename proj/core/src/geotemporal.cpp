#include "geocloud/geotemporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "csv.hpp"
#include "geocloud/error.hpp"
#include "geocloud/random.hpp"

namespace geocloud {

using namespace std::chrono;

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string buf(text);
  if (buf.size() != 20 ||
      std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s, &tail) !=
          7 ||
      tail != 'Z') {
    throw InvariantViolation("timestamp '" + buf + "' is not YYYY-MM-DDTHH:MM:SSZ");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw InvariantViolation("timestamp '" + buf + "' is not a valid date");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss tod{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

void GeotemporalTrace::validate() const {
  if (prices.empty() || prices.size() != temps.size()) {
    throw InvariantViolation("trace '" + location +
                             "' needs equal-length, non-empty price and temperature series");
  }
  if (!(step_h > 0.0)) throw InvariantViolation("trace step must be positive");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0)) {
      throw InvariantViolation("trace '" + location + "' has non-positive price at index " +
                               std::to_string(i));
    }
    if (!(temps[i] >= -40.0 && temps[i] <= 60.0)) {
      throw InvariantViolation("trace '" + location + "' temperature outside [-40, 60] at index " +
                               std::to_string(i));
    }
  }
}

double ppue(double temp_c) noexcept { return 7.1705e-5 * temp_c * temp_c + 0.0041 * temp_c + 1.0743; }

double total_power(double p_it_w, double temp_c) noexcept { return ppue(temp_c) * p_it_w; }

double energy_cost(std::span<const double> powers_w, std::span<const double> prices_per_kwh,
                   double step_h) {
  if (powers_w.size() != prices_per_kwh.size()) {
    throw LengthMismatch("power series has " + std::to_string(powers_w.size()) +
                         " entries, price series " + std::to_string(prices_per_kwh.size()));
  }
  // Neumaier summation: long horizons of small per-step costs otherwise drift.
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t t = 0; t < powers_w.size(); ++t) {
    const double term = (powers_w[t] / 1000.0) * prices_per_kwh[t];
    const double next = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
  }
  return step_h * (sum + carry);
}

std::string_view to_string(TraceMode mode) noexcept {
  return mode == TraceMode::fixed ? "fixed" : "rtep";
}

TraceMode parse_trace_mode(std::string_view name) {
  if (name == "fixed") return TraceMode::fixed;
  if (name == "rtep") return TraceMode::rtep;
  throw ConfigError("unknown trace mode '" + std::string(name) + "' (expected fixed|rtep)");
}

GeotemporalTrace synth_trace(const Location& loc, int samples, TraceMode mode,
                             std::uint64_t seed, const SynthParams& params) {
  if (samples < 1) throw InvariantViolation("synthetic trace needs at least one sample");
  if (!(params.step_h > 0.0)) throw InvariantViolation("synthetic trace step must be positive");
  if (!(loc.mean_price > 0.0)) {
    throw InvariantViolation("location '" + loc.id + "' mean_price must be positive");
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::uint64_t salt = stable_hash(loc.id);
  Rng price_rng = make_rng(seed, streams::prices, salt);
  Rng temp_rng = make_rng(seed, streams::temperatures, salt);
  // One distribution per engine: normal_distribution caches its second draw.
  std::normal_distribution<double> price_normal(0.0, 1.0);
  std::normal_distribution<double> temp_normal(0.0, 1.0);

  GeotemporalTrace trace;
  trace.location = loc.id;
  trace.start = kDefaultTraceStart;
  trace.step_h = params.step_h;
  trace.prices.reserve(static_cast<std::size_t>(samples));
  trace.temps.reserve(static_cast<std::size_t>(samples));

  for (int t = 0; t < samples; ++t) {
    const double local_hour = std::fmod(t * params.step_h + loc.timezone_offset_h + 24.0 * 1000, 24.0);

    double price = loc.mean_price;
    if (mode == TraceMode::rtep) {
      const double diurnal =
          -params.price_amplitude * std::cos(two_pi * (local_hour - params.price_trough_hour) / 24.0);
      price = loc.mean_price * (1.0 + diurnal + params.price_noise * price_normal(price_rng));
      price = std::max(price, params.price_floor * loc.mean_price);
    }

    double temp = loc.mean_temp +
                  params.temp_amplitude *
                      std::cos(two_pi * (local_hour - params.temp_peak_hour) / 24.0) +
                  params.temp_noise * temp_normal(temp_rng);
    temp = std::clamp(temp, -40.0, 60.0);

    trace.prices.push_back(price);
    trace.temps.push_back(temp);
  }
  trace.validate();
  return trace;
}

GeotemporalTrace load_trace(const std::filesystem::path& path, std::string location_id) {
  GeotemporalTrace trace;
  trace.location = location_id.empty() ? path.stem().string() : std::move(location_id);

  std::vector<Timestamp> stamps;
  csv::read(path, {"timestamp", "price_usd_per_kwh", "temp_c"},
            [&](const std::vector<std::string>& f, std::size_t row) {
              Timestamp ts;
              try {
                ts = parse_timestamp(f[0]);
              } catch (const InvariantViolation& e) {
                throw ParseError(path.string() + ": " + e.what(), row);
              }
              const double price = csv::to_double(f[1], row, "price_usd_per_kwh");
              const double temp = csv::to_double(f[2], row, "temp_c");
              if (!(price > 0.0)) {
                throw InvariantViolation(path.string() + ": non-positive price at row " +
                                         std::to_string(row));
              }
              if (!stamps.empty()) {
                const auto delta = ts - stamps.back();
                const auto expected = stamps.size() >= 2 ? stamps[1] - stamps[0] : delta;
                if (delta <= seconds{0} || delta != expected) {
                  throw InvariantViolation(path.string() + ": timestamp gap or disorder at row " +
                                           std::to_string(row));
                }
              }
              stamps.push_back(ts);
              trace.prices.push_back(price);
              trace.temps.push_back(temp);
            });

  if (stamps.empty()) throw InvariantViolation(path.string() + ": trace has no rows");
  trace.start = stamps.front();
  if (stamps.size() >= 2) {
    trace.step_h = duration<double, std::ratio<3600>>(stamps[1] - stamps[0]).count();
  }
  trace.validate();
  return trace;
}

void write_trace(const std::filesystem::path& path, const GeotemporalTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "timestamp,price_usd_per_kwh,temp_c\n";
  const auto step = duration_cast<seconds>(duration<double, std::ratio<3600>>(trace.step_h));
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", trace.prices[i], trace.temps[i]);
    out << format_timestamp(trace.start + step * static_cast<long long>(i)) << buf;
  }
}

}  // namespace geocloud
