#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "geocloud/power_model.hpp"

namespace geocloud {

/// One power measurement at frequency step q with c active cores.
struct PowerSample {
  double q = 0.0;
  double c = 0.0;
  double power_w = 0.0;
};

struct SurfaceFit {
  PowerCoefficients coefficients;
  /// Largest |fit - sample| / |sample| over the input samples.
  double max_relative_deviation = 0.0;
  /// Mean of |fit - sample| / |sample| over the input samples.
  double mean_relative_deviation = 0.0;
  std::size_t sample_count = 0;
};

/// Least-squares fit of the seven-term power surface.
/// Throws RankDeficient when the samples do not determine all seven terms.
SurfaceFit fit_power_surface(std::span<const PowerSample> samples);

/// Reads a `q,c,power_w` CSV. Throws ParseError with the offending row.
std::vector<PowerSample> load_power_samples(const std::filesystem::path& path);

}  // namespace geocloud
