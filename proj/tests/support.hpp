#pragma once
// helpers shared by the unit and acceptance binaries

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fefp/closure.hpp"
#include "fefp/moments.hpp"
#include "fefp/rng.hpp"
#include "fefp/testkit/oracles.hpp"

namespace fefp::test {

inline testkit::Matrix3 diag3(double a, double b, double c) { return {{{a, 0, 0}, {0, b, 0}, {0, 0, c}}}; }

inline MomentSet maxwell_moments(double rho = 1.0, double theta = 1.0) {
  return gaussian_central_moments(diag3(theta, theta, theta), rho);
}

template <std::size_t N>
Eigen::Matrix<double, int(N), int(N)> to_eigen(const linalg::Matrix<N>& A) {
  Eigen::Matrix<double, int(N), int(N)> M;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) M(int(i), int(j)) = A[i][j];
  return M;
}

template <std::size_t N>
Eigen::Matrix<double, int(N), 1> to_eigen(const linalg::Vector<N>& v) {
  Eigen::Matrix<double, int(N), 1> x;
  for (std::size_t i = 0; i < N; ++i) x(int(i)) = v[i];
  return x;
}

/// Natural size of the production of H: rho theta^(deg/2) / tau.
inline double production_scale(const Polynomial& H, const MomentSet& m, double tau) {
  return m.rho * std::pow(m.theta(), 0.5 * H.degree()) / tau;
}

/// Full FE-FP closure of an analytic density: quadrature moments, production,
/// assembly, solve.
struct SolvedDensity {
  testkit::AnalyticDensity f;
  MomentSet m;
  closure::ProductionTerms P;
  closure::AssembledSystem sys;
  closure::DriftCoefficients c;
  double tau = 0.0;
  double cd = 0.0;
};

inline SolvedDensity solve_density(const testkit::AnalyticDensity& f, const GasModel& gas, double eps0 = 1e-3) {
  SolvedDensity s;
  s.f = f;
  s.m = testkit::quadrature_moments(f);
  const double theta = s.m.theta();
  s.tau = transport_scales(theta, s.m.rho, gas).tau;
  s.cd = closure::stabilization_coefficient(s.m, eps0, theta);
  s.P = closure::production_terms(s.m, gas);
  s.sys = closure::assemble_system(s.m, s.tau, theta / s.tau, closure::kStabilizerToDrift * s.cd, s.P);
  s.c = closure::solve_coefficients(s.sys, s.m);
  return s;
}

/// Largest relative moment-matching residual over the matched basis,
/// |<grad H . A, f> + D <lap H, f> - P_H| / scale, all by quadrature.
inline double moment_matching_residual(const SolvedDensity& s) {
  const auto& basis = closure::BasisSet::heat_flux_3d();
  const auto P = s.P.for_basis();
  double worst = 0.0;
  for (std::size_t a = 0; a < closure::kMatched; ++a) {
    const double proj = testkit::operator_projection(s.f, s.c, basis.matched[a]);
    worst = std::max(worst, std::abs(proj - P[a]) / production_scale(basis.matched[a], s.m, s.tau));
  }
  return worst;
}

/// <sum_a c_a lap H_a, f> - 30 c_d <|v'|^4, f> by quadrature, relative to the
/// size of its first term's natural scale.
inline double entropy_constraint_residual(const SolvedDensity& s) {
  // the potential is sum_a c_a H_a; its Laplacian is the divergence of the
  // higher-order drift without the stabilizer, so evaluate that field directly
  DriftPolynomial d = s.c.to_drift();
  d.inv_tau = 0.0;
  d.quintic = 0.0;
  const VectorPoly A = d.to_poly();
  const double lhs = testkit::quadrature_expectation(s.f, divergence(A));
  const double rhs = closure::kEntropyFactor * s.cd * testkit::quadrature_expectation(s.f, Polynomial::norm2_pow(2));
  const double scale = s.m.rho / s.tau;
  return std::abs(lhs - rhs) / scale;
}

}  // namespace fefp::test
