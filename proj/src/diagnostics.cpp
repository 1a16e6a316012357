#include "fefp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fefp/error.hpp"
#include "fefp/linalg.hpp"

namespace fefp {

EntropyReport gaussian_entropy_fisher(const Matrix3& Pi, double theta_eq, double tau) {
  if (!(theta_eq > 0.0)) throw std::invalid_argument("gaussian_entropy_fisher: theta_eq must be positive");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(Pi[i][j] - Pi[j][i]) > 1e-12 * (std::abs(Pi[i][j]) + std::abs(Pi[j][i]) + 1e-300))
        throw std::invalid_argument("gaussian_entropy_fisher: Pi not symmetric");
  const auto L = linalg::cholesky<3>(Pi);
  if (!L) throw std::invalid_argument("gaussian_entropy_fisher: Pi not positive definite");
  const double det = std::pow((*L)[0][0] * (*L)[1][1] * (*L)[2][2], 2);
  const Matrix3 inv = linalg::cholesky_inverse(*L);

  // M = I/theta - Pi^{-1}; I = tr(M M Pi)
  Matrix3 M{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) M[i][j] = (i == j ? 1.0 / theta_eq : 0.0) - inv[i][j];
  double fisher = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double mm = 0.0;
      for (std::size_t k = 0; k < 3; ++k) mm += M[i][k] * M[k][j];
      fisher += mm * Pi[j][i];
    }

  EntropyReport r;
  r.H = -0.5 * std::log(std::pow(2.0 * std::numbers::pi * std::numbers::e, 3) * det);
  r.I = std::max(fisher, 0.0);
  if (tau > 0.0) r.predicted_rate = -(theta_eq / tau) * r.I;
  return r;
}

void SteadyAccumulator::add(std::span<const double> field) {
  if (field.size() != mean_.size()) throw std::invalid_argument("SteadyAccumulator: field size mismatch");
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double d = field[k] - mean_[k];
    mean_[k] += d * inv;
    m2_[k] += d * (field[k] - mean_[k]);
  }
}

double SteadyAccumulator::variance(std::size_t k) const {
  return n_ < 2 ? 0.0 : m2_[k] / static_cast<double>(n_ - 1);
}

double SteadyAccumulator::standard_error(std::size_t k) const {
  return n_ < 2 ? 0.0 : std::sqrt(variance(k) / static_cast<double>(n_));
}

ShockMetrics shock_metrics(std::span<const double> x, std::span<const double> T) {
  if (x.size() != T.size() || x.size() < 3) throw std::invalid_argument("shock_metrics: need matching profiles");
  ShockMetrics m;
  m.peak_index = static_cast<std::size_t>(std::max_element(T.begin(), T.end()) - T.begin());
  m.peak_T = T[m.peak_index];
  const double base = T[0];
  const double jump = m.peak_T - base;
  if (!(jump > 1e-12 * std::max(std::abs(m.peak_T), 1.0))) throw UndefinedMetricError("shock_metrics: flat profile");

  // walk upstream from the peak to the last crossing of each level
  auto crossing = [&](double level) {
    for (std::size_t k = m.peak_index; k > 0; --k)
      if (T[k - 1] < level && T[k] >= level) {
        const double f = (level - T[k - 1]) / (T[k] - T[k - 1]);
        return x[k - 1] + f * (x[k] - x[k - 1]);
      }
    throw UndefinedMetricError("shock_metrics: no monotone upstream rise");
  };
  m.x90 = crossing(base + 0.9 * jump);
  m.x10 = crossing(base + 0.1 * jump);
  m.thickness = m.x90 - m.x10;
  return m;
}

}  // namespace fefp
