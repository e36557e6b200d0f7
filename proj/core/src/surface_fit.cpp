#include "geocloud/surface_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "csv.hpp"
#include "geocloud/error.hpp"

namespace geocloud {

namespace {

constexpr int kTerms = 7;

// Column order: 1, q, c, q^2, qc, q^3, q^2 c.
Eigen::Matrix<double, 1, kTerms> monomials(double q, double c) {
  Eigen::Matrix<double, 1, kTerms> row;
  row << 1.0, q, c, q * q, q * c, q * q * q, q * q * c;
  return row;
}

}  // namespace

SurfaceFit fit_power_surface(std::span<const PowerSample> samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < kTerms) {
    throw RankDeficient("need at least " + std::to_string(kTerms) + " samples, got " +
                        std::to_string(n));
  }

  Eigen::MatrixXd design(n, kTerms);
  Eigen::VectorXd power(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    design.row(i) = monomials(s.q, s.c);
    power(i) = s.power_w;
  }

  // Column scaling keeps the q^3 column from dominating the rank decision.
  const Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < kTerms; ++j) {
    if (scale(j) == 0.0) throw RankDeficient("a monomial column is identically zero");
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < kTerms) {
    throw RankDeficient("design matrix rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(kTerms));
  }
  const Eigen::VectorXd x = qr.solve(power).cwiseQuotient(scale);

  SurfaceFit fit;
  fit.coefficients = {.p00 = x(0),
                      .p10 = x(1),
                      .p01 = x(2),
                      .p20 = x(3),
                      .p11 = x(4),
                      .p30 = x(5),
                      .p21 = x(6)};
  fit.sample_count = samples.size();

  const Eigen::VectorXd predicted = design * x;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rel = std::abs(predicted(i) - power(i)) / std::abs(power(i));
    fit.max_relative_deviation = std::max(fit.max_relative_deviation, rel);
    sum += rel;
  }
  fit.mean_relative_deviation = sum / static_cast<double>(n);
  return fit;
}

std::vector<PowerSample> load_power_samples(const std::filesystem::path& path) {
  std::vector<PowerSample> out;
  csv::read(path, {"q", "c", "power_w"}, [&](const auto& f, std::size_t row) {
    PowerSample s{csv::to_double(f[0], row, "q"), csv::to_double(f[1], row, "c"),
                  csv::to_double(f[2], row, "power_w")};
    if (!(s.power_w > 0.0)) throw ParseError("power_w must be positive", row);
    out.push_back(s);
  });
  return out;
}

}  // namespace geocloud
