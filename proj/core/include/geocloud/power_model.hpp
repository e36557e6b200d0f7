#pragma once

#include <span>
#include <string>
#include <string_view>

namespace geocloud {

enum class Architecture { arm, intel };

std::string_view to_string(Architecture arch) noexcept;
/// Accepts "arm" or "intel" (case-insensitive); throws ConfigError otherwise.
Architecture parse_architecture(std::string_view name);

/// Tolerance used when matching a frequency against a ladder step.
inline constexpr double kLadderTolerance = 1e-9;

/// Discrete set of CPU frequencies f_min, f_min + f_step, ..., f_max (GHz).
///
/// Steps are indexed from 1 (f_min) to step_count() (f_max).
class FrequencyLadder {
 public:
  FrequencyLadder(double f_min_ghz, double f_max_ghz, double f_step_ghz);

  double f_min() const noexcept { return f_min_; }
  double f_max() const noexcept { return f_max_; }
  double f_step() const noexcept { return f_step_; }
  int step_count() const noexcept { return step_count_; }

  /// Frequency of step q in GHz; throws OutOfGrid for q outside [1, step_count].
  double frequency(int q) const;

  /// Step index of an on-ladder frequency.
  /// Throws OutOfRange outside [f_min, f_max] and OffLadderFrequency off-grid.
  int step_of(double f_ghz) const;

  static FrequencyLadder arm() { return {0.8, 1.8, 0.1}; }
  static FrequencyLadder intel() { return {2.6, 3.4, 0.2}; }

  friend bool operator==(const FrequencyLadder&, const FrequencyLadder&) = default;

 private:
  double f_min_;
  double f_max_;
  double f_step_;
  int step_count_;
};

inline int freq_to_step(const FrequencyLadder& ladder, double f_ghz) {
  return ladder.step_of(f_ghz);
}

/// Coefficients of the cubic power surface in frequency step q and active cores c:
///   P(q, c) = p00 + p10 q + p01 c + p20 q^2 + p11 q c + p30 q^3 + p21 q^2 c
struct PowerCoefficients {
  double p00 = 0.0;
  double p10 = 0.0;
  double p01 = 0.0;
  double p20 = 0.0;
  double p11 = 0.0;
  double p30 = 0.0;
  double p21 = 0.0;

  /// Measured Exynos 5410 (Cortex-A15) surface, q in 1..11, c in 1..4.
  static constexpr PowerCoefficients arm() {
    return {.p00 = 1.318,
            .p10 = 0.2243,
            .p01 = 0.03559,
            .p20 = 0.03137,
            .p11 = -0.00318,
            .p30 = 0.00711,
            .p21 = 0.000438};
  }

  friend bool operator==(const PowerCoefficients&, const PowerCoefficients&) = default;
};

/// Valid (q, c) domain of a calibrated surface.
struct PowerGrid {
  int max_step = 11;
  int max_cores = 4;
};

/// Full-load power with c active cores at step q (W).
double active_power(const PowerCoefficients& coeffs, int q, int c, const PowerGrid& grid);
/// Idle power at step q (W): the surface with its core terms dropped.
double idle_power(const PowerCoefficients& coeffs, int q, const PowerGrid& grid);

/// Coefficients of the same surface re-expressed in a new step variable,
/// P'(q, c) = scale * P(offset + slope * q, c). The monomial set is closed
/// under this substitution, so the result is exact.
PowerCoefficients remap_steps(const PowerCoefficients& coeffs, double offset, double slope,
                              double scale = 1.0);

/// Synthetic Intel surface: the ARM surface stretched over the 5-step Intel
/// ladder and scaled so that active_power(5, 4) equals `max_power_w`.
/// No measured Intel coefficients are available; reports flag this profile.
PowerCoefficients synthetic_intel_coefficients(double max_power_w = 95.0);

/// Quadratic power ratio of a core running a workload of CPU-boundedness beta.
struct GammaCoefficients {
  double g0 = -1.362;
  double g1 = 2.798;
  double g2 = 1.31;
  /// Normalisation; g0 + g1 + g2 makes gamma(1) == 1.
  double p_max = -1.362 + 2.798 + 1.31;

  static GammaCoefficients normalized(double g0, double g1, double g2) {
    return {g0, g1, g2, g0 + g1 + g2};
  }

  friend bool operator==(const GammaCoefficients&, const GammaCoefficients&) = default;
};

/// Throws BetaOutOfRange unless 0 <= beta <= 1.
double gamma(const GammaCoefficients& gc, double beta);

struct Utilization {
  double u = 0.0;
  int cores_active = 0;
};

class PowerModel;

/// CPU utilisation of a host given the beta of each hosted vCPU.
/// Only the `pm_cores` highest-beta vCPUs count when they outnumber the cores.
Utilization pm_utilization(const PowerModel& model, std::span<const double> vcpu_betas,
                           int pm_cores);

/// Power model for one CPU architecture.
class PowerModel {
 public:
  /// Validates that the surface is strictly positive over the grid and that
  /// gamma stays in (0, 1] on [0, 1]; throws InvariantViolation otherwise.
  PowerModel(Architecture arch, FrequencyLadder ladder, PowerCoefficients coeffs,
             GammaCoefficients gamma, int core_count_max = 4, bool synthetic = false);

  static PowerModel arm();
  static PowerModel intel(double max_power_w = 95.0);

  Architecture architecture() const noexcept { return arch_; }
  const FrequencyLadder& ladder() const noexcept { return ladder_; }
  const PowerCoefficients& coefficients() const noexcept { return coeffs_; }
  const GammaCoefficients& gamma_coefficients() const noexcept { return gamma_; }
  int core_count_max() const noexcept { return core_count_max_; }
  PowerGrid grid() const noexcept { return {ladder_.step_count(), core_count_max_}; }
  /// True when the coefficients were derived rather than measured.
  bool synthetic() const noexcept { return synthetic_; }

  double active_power(int q, int c) const;
  double idle_power(int q) const;

  /// Host power at frequency step q.
  double power_at_step(int q, std::span<const double> vcpu_betas, int pm_cores) const;

 private:
  Architecture arch_;
  FrequencyLadder ladder_;
  PowerCoefficients coeffs_;
  GammaCoefficients gamma_;
  int core_count_max_;
  bool synthetic_;
};

/// Host power at frequency f (GHz):
///   idle(q) + (active(q, c) - idle(q)) * u, or idle(q) when no vCPU is hosted.
double pm_power(const PowerModel& model, double f_ghz, std::span<const double> vcpu_betas,
                int pm_cores);

}  // namespace geocloud
