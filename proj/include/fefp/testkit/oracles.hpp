#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fefp/closure.hpp"
#include "fefp/moments.hpp"
#include "fefp/polynomial.hpp"

namespace fefp::testkit {

using Matrix3 = std::array<std::array<double, 3>, 3>;

inline constexpr int kNodesPerAxis = 16;

/// Gauss-Hermite rule for the weight exp(-x^2 / 2) / sqrt(2 pi) (probabilists'),
/// so sum w_k g(x_k) = E[g(Z)] for Z ~ N(0, 1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussHermite& standard(int n = kNodesPerAxis);
};

struct GaussianComponent {
  double weight = 1.0;
  Vec3 mean{0.0, 0.0, 0.0};
  Matrix3 cov{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
};

/// rho-weighted sum of Gaussians; the total weight is the density.
struct AnalyticDensity {
  std::vector<GaussianComponent> components;

  static AnalyticDensity gaussian(const Matrix3& Pi, double rho = 1.0, const Vec3& U = {0.0, 0.0, 0.0});
  double rho() const;
  Vec3 mean() const;
  /// Throws std::invalid_argument on a non-positive weight or non-SPD covariance.
  void validate() const;
};

/// <P(v - U), f> with U the density's mean velocity, by tensor Gauss-Hermite
/// quadrature per component. Throws std::invalid_argument if deg P exceeds
/// 2 * nodes - 1.
double quadrature_expectation(const AnalyticDensity& f, const Polynomial& P);

/// Applies `g` to every quadrature point in the central frame; g(v', w).
template <class G>
void for_each_node(const AnalyticDensity& f, G&& g);

/// Central MomentSet of the density computed by quadrature.
MomentSet quadrature_moments(const AnalyticDensity& f, int max_order = kMaxOrder);

/// Weak projection <grad H . A, f> + D <lap H, f> of the FP operator with
/// drift `drift` and diffusion D, by quadrature.
double operator_projection(const AnalyticDensity& f, const DriftPolynomial& drift, double D, const Polynomial& H);
double operator_projection(const AnalyticDensity& f, const closure::DriftCoefficients& c, const Polynomial& H);

/// Two-component mixture with equal weights split along v1 at +-shift, with
/// different per-component variances; has a nonzero heat flux along v1.
AnalyticDensity bi_gaussian(double shift, double var_plus, double var_minus, double rho = 1.0);

/// Random mixture with 1..3 components and random SPD covariances.
template <class Rng>
AnalyticDensity random_mixture(Rng& rng);

struct RateFit {
  double rate = 0.0;
  double stderr_rate = 0.0;
};

/// Least-squares slope of log(values) against t. Throws std::invalid_argument
/// for non-positive values or fewer than two points.
RateFit fd_rate(std::span<const double> t, std::span<const double> values);

/// Eigenvalues of a symmetric 3x3 matrix, ascending (Jacobi rotations).
std::array<double, 3> symmetric_eigenvalues(Matrix3 A);

}  // namespace fefp::testkit

#include "fefp/testkit/oracles_impl.hpp"
