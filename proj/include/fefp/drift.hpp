#pragma once

#include <array>

#include "fefp/kinetics.hpp"
#include "fefp/polynomial.hpp"

namespace fefp {

/// Evaluation form shared by every drift model in the solver:
///
///   A_i(v') = a0_i + sum_j a1_ij v'_j + a2_i |v'|^2 + (b . v') v'_i
///             + a3 v'_i |v'|^2 - a4 v'_i |v'|^4 - v'_i / tau
///
/// Linear, cubic and FE-FP drifts all map onto it, so the particle kernels
/// need only one code path.
struct DriftPolynomial {
  Vec3 constant{};
  std::array<double, 9> linear{};  // row-major a1
  Vec3 quad_norm{};
  Vec3 quad_proj{};
  double cubic = 0.0;
  double quintic = 0.0;
  double inv_tau = 0.0;

  /// Full drift including the -v'/tau relaxation.
  Vec3 eval(const Vec3& v) const noexcept;
  /// Drift without the -v'/tau part (the piece integrated explicitly).
  Vec3 eval_nonlinear(const Vec3& v) const noexcept;
  VectorPoly to_poly() const;
};

inline Vec3 DriftPolynomial::eval_nonlinear(const Vec3& v) const noexcept {
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double bv = quad_proj[0] * v[0] + quad_proj[1] * v[1] + quad_proj[2] * v[2];
  const double radial = bv + cubic * r2 - quintic * r2 * r2;
  Vec3 a;
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    a[k] = constant[k] + linear[3 * k] * v[0] + linear[3 * k + 1] * v[1] + linear[3 * k + 2] * v[2] +
           quad_norm[k] * r2 + radial * v[k];
  }
  return a;
}

inline Vec3 DriftPolynomial::eval(const Vec3& v) const noexcept {
  Vec3 a = eval_nonlinear(v);
  for (std::size_t k = 0; k < 3; ++k) a[k] -= inv_tau * v[k];
  return a;
}

}  // namespace fefp
