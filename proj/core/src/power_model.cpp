#include "geocloud/power_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "geocloud/error.hpp"

namespace geocloud {

std::string_view to_string(Architecture arch) noexcept {
  switch (arch) {
    case Architecture::arm:
      return "arm";
    case Architecture::intel:
      return "intel";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "arm") return Architecture::arm;
  if (lower == "intel") return Architecture::intel;
  throw ConfigError("unknown architecture '" + std::string(name) + "' (expected arm|intel)");
}

FrequencyLadder::FrequencyLadder(double f_min_ghz, double f_max_ghz, double f_step_ghz)
    : f_min_(f_min_ghz), f_max_(f_max_ghz), f_step_(f_step_ghz) {
  if (!(f_min_ > 0.0) || !(f_min_ < f_max_) || !(f_step_ > 0.0)) {
    throw InvariantViolation("frequency ladder requires 0 < f_min < f_max and f_step > 0");
  }
  const double span = (f_max_ - f_min_) / f_step_;
  const double steps = std::round(span);
  if (std::abs(f_min_ + steps * f_step_ - f_max_) > kLadderTolerance) {
    throw InvariantViolation("frequency ladder span is not a multiple of f_step");
  }
  step_count_ = static_cast<int>(steps) + 1;
}

double FrequencyLadder::frequency(int q) const {
  if (q < 1 || q > step_count_) {
    throw OutOfGrid("frequency step " + std::to_string(q) + " outside 1.." +
                    std::to_string(step_count_));
  }
  if (q == step_count_) return f_max_;
  return f_min_ + (q - 1) * f_step_;
}

int FrequencyLadder::step_of(double f_ghz) const {
  if (!(f_ghz >= f_min_ - kLadderTolerance) || !(f_ghz <= f_max_ + kLadderTolerance)) {
    throw OutOfRange("frequency " + std::to_string(f_ghz) + " GHz outside [" +
                     std::to_string(f_min_) + ", " + std::to_string(f_max_) + "]");
  }
  const double k = std::round((f_ghz - f_min_) / f_step_);
  if (std::abs(f_min_ + k * f_step_ - f_ghz) > kLadderTolerance) {
    throw OffLadderFrequency("frequency " + std::to_string(f_ghz) + " GHz is not on the ladder");
  }
  return static_cast<int>(k) + 1;
}

namespace {

void check_grid(int q, int c, const PowerGrid& grid) {
  if (q < 1 || q > grid.max_step || c < 1 || c > grid.max_cores) {
    throw OutOfGrid("(q=" + std::to_string(q) + ", c=" + std::to_string(c) +
                    ") outside calibrated grid " + std::to_string(grid.max_step) + "x" +
                    std::to_string(grid.max_cores));
  }
}

double idle_terms(const PowerCoefficients& k, double q) {
  return k.p00 + q * (k.p10 + q * (k.p20 + q * k.p30));
}

double core_terms(const PowerCoefficients& k, double q, double c) {
  return c * (k.p01 + q * (k.p11 + q * k.p21));
}

}  // namespace

double active_power(const PowerCoefficients& coeffs, int q, int c, const PowerGrid& grid) {
  check_grid(q, c, grid);
  return idle_terms(coeffs, q) + core_terms(coeffs, q, c);
}

double idle_power(const PowerCoefficients& coeffs, int q, const PowerGrid& grid) {
  check_grid(q, 1, grid);
  return idle_terms(coeffs, q);
}

PowerCoefficients remap_steps(const PowerCoefficients& k, double a, double b, double s) {
  PowerCoefficients out;
  out.p00 = s * (k.p00 + k.p10 * a + k.p20 * a * a + k.p30 * a * a * a);
  out.p10 = s * (k.p10 * b + 2.0 * k.p20 * a * b + 3.0 * k.p30 * a * a * b);
  out.p20 = s * (k.p20 * b * b + 3.0 * k.p30 * a * b * b);
  out.p30 = s * (k.p30 * b * b * b);
  out.p01 = s * (k.p01 + k.p11 * a + k.p21 * a * a);
  out.p11 = s * (k.p11 * b + 2.0 * k.p21 * a * b);
  out.p21 = s * (k.p21 * b * b);
  return out;
}

PowerCoefficients synthetic_intel_coefficients(double max_power_w) {
  if (!(max_power_w > 0.0)) {
    throw InvariantViolation("synthetic Intel max power must be positive");
  }
  const auto arm = PowerCoefficients::arm();
  const int arm_steps = FrequencyLadder::arm().step_count();
  const int intel_steps = FrequencyLadder::intel().step_count();
  // Map Intel step 1 -> ARM step 1 and Intel step 5 -> ARM step 11.
  const double slope = static_cast<double>(arm_steps - 1) / (intel_steps - 1);
  const double offset = 1.0 - slope;
  const double arm_peak = active_power(arm, arm_steps, 4, PowerGrid{arm_steps, 4});
  return remap_steps(arm, offset, slope, max_power_w / arm_peak);
}

double gamma(const GammaCoefficients& gc, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw BetaOutOfRange("beta " + std::to_string(beta) + " outside [0, 1]");
  }
  return (gc.g0 * beta * beta + gc.g1 * beta + gc.g2) / gc.p_max;
}

Utilization pm_utilization(const PowerModel& model, std::span<const double> vcpu_betas,
                           int pm_cores) {
  if (pm_cores < 1) throw OutOfGrid("pm_cores must be >= 1");
  if (vcpu_betas.empty()) return {};

  const auto& gc = model.gamma_coefficients();
  const auto count = std::min<std::size_t>(vcpu_betas.size(), static_cast<std::size_t>(pm_cores));
  double sum = 0.0;
  if (count == vcpu_betas.size()) {
    for (double beta : vcpu_betas) sum += gamma(gc, beta);
  } else {
    std::vector<double> sorted(vcpu_betas.begin(), vcpu_betas.end());
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(count),
                      sorted.end(), std::greater<>());
    for (std::size_t i = 0; i < count; ++i) sum += gamma(gc, sorted[i]);
  }
  const int cores_active = static_cast<int>(count);
  return {sum / cores_active, cores_active};
}

PowerModel::PowerModel(Architecture arch, FrequencyLadder ladder, PowerCoefficients coeffs,
                       GammaCoefficients gamma_coeffs, int core_count_max, bool synthetic)
    : arch_(arch),
      ladder_(ladder),
      coeffs_(coeffs),
      gamma_(gamma_coeffs),
      core_count_max_(core_count_max),
      synthetic_(synthetic) {
  if (core_count_max_ < 1) throw InvariantViolation("core_count_max must be >= 1");
  const PowerGrid g = grid();
  for (int q = 1; q <= g.max_step; ++q) {
    if (!(geocloud::idle_power(coeffs_, q, g) > 0.0)) {
      throw InvariantViolation("idle power not positive at q=" + std::to_string(q));
    }
    for (int c = 1; c <= g.max_cores; ++c) {
      if (!(geocloud::active_power(coeffs_, q, c, g) > 0.0)) {
        throw InvariantViolation("active power not positive at q=" + std::to_string(q) +
                                 ", c=" + std::to_string(c));
      }
    }
  }
  if (!(gamma_.p_max != 0.0)) throw InvariantViolation("gamma p_max must be non-zero");
  for (int i = 0; i <= 1000; ++i) {
    const double value = geocloud::gamma(gamma_, i / 1000.0);
    if (!(value > 0.0) || value > 1.0 + 1e-12) {
      throw InvariantViolation("gamma leaves (0, 1] at beta=" + std::to_string(i / 1000.0));
    }
  }
}

PowerModel PowerModel::arm() {
  return {Architecture::arm, FrequencyLadder::arm(), PowerCoefficients::arm(),
          GammaCoefficients{}, 4, false};
}

PowerModel PowerModel::intel(double max_power_w) {
  return {Architecture::intel, FrequencyLadder::intel(),
          synthetic_intel_coefficients(max_power_w), GammaCoefficients{}, 4, true};
}

double PowerModel::active_power(int q, int c) const {
  return geocloud::active_power(coeffs_, q, c, grid());
}

double PowerModel::idle_power(int q) const { return geocloud::idle_power(coeffs_, q, grid()); }

double PowerModel::power_at_step(int q, std::span<const double> vcpu_betas, int pm_cores) const {
  if (pm_cores > core_count_max_) {
    throw OutOfGrid("host has " + std::to_string(pm_cores) + " cores; model calibrated for " +
                    std::to_string(core_count_max_));
  }
  const double idle = idle_power(q);
  const Utilization util = pm_utilization(*this, vcpu_betas, pm_cores);
  if (util.cores_active == 0) return idle;
  return idle + (active_power(q, util.cores_active) - idle) * util.u;
}

double pm_power(const PowerModel& model, double f_ghz, std::span<const double> vcpu_betas,
                int pm_cores) {
  return model.power_at_step(model.ladder().step_of(f_ghz), vcpu_betas, pm_cores);
}

}  // namespace geocloud
