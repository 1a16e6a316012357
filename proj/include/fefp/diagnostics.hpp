#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fefp {

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct EntropyReport {
  /// -1/2 ln((2 pi e)^3 det Pi), unit-density convention
  double H = 0.0;
  /// tr((I/theta_eq - Pi^{-1})^2 Pi)
  double I = 0.0;
  /// -(theta_eq / tau) I
  double predicted_rate = 0.0;
};

/// Gaussian-surrogate entropy and Fisher information. Throws
/// std::invalid_argument if Pi is not SPD or theta_eq <= 0.
/// predicted_rate uses tau when tau > 0 and is left at 0 otherwise.
EntropyReport gaussian_entropy_fisher(const Matrix3& Pi, double theta_eq, double tau = 0.0);

/// Running per-entry mean and variance (Welford) of a fixed-length field.
class SteadyAccumulator {
 public:
  explicit SteadyAccumulator(std::size_t size = 0) : mean_(size, 0.0), m2_(size, 0.0) {}

  void add(std::span<const double> field);
  std::size_t samples() const noexcept { return n_; }
  std::size_t size() const noexcept { return mean_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  /// Unbiased sample variance; zero for fewer than two samples.
  double variance(std::size_t k) const;
  /// Standard error of the mean.
  double standard_error(std::size_t k) const;

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t n_ = 0;
};

struct ShockMetrics {
  double peak_T = 0.0;
  std::size_t peak_index = 0;
  /// distance between the 10% and 90% points of the upstream rise
  double thickness = 0.0;
  double x10 = 0.0;
  double x90 = 0.0;
};

/// Peak value and 10-90% rise distance of the upstream jump of a temperature
/// profile sampled at increasing abscissae x. The upstream level is T[0]; the
/// rise is searched from the peak toward the start with linear interpolation.
/// Throws UndefinedMetricError for a flat profile.
ShockMetrics shock_metrics(std::span<const double> x, std::span<const double> T);

}  // namespace fefp
