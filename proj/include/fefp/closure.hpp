#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "fefp/drift.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/linalg.hpp"
#include "fefp/moments.hpp"
#include "fefp/polynomial.hpp"

namespace fefp::closure {

inline constexpr std::size_t kMatched = 8;
inline constexpr std::size_t kSystem = 9;
/// Index of the entropy polynomial |v'|^4 in the system ordering.
inline constexpr std::size_t kPhi = 8;
/// Quadratic members v'_i v'_j (i <= j), heat-flux members, |v'|^4.
inline constexpr std::size_t kFullStressSystem = 10;
/// (2k+2)(2k+1) with 2k = 4, the entropy-constraint factor.
inline constexpr double kEntropyFactor = 30.0;
/// Drift stabilizer c4 multiplies v'|v'|^4; it equals 6 c_d because
/// c_d grad |v'|^6 = 6 c_d v' |v'|^4.
inline constexpr double kStabilizerToDrift = 6.0;

using SymMatrix3 = std::array<std::array<double, 3>, 3>;

/// The fixed heat-flux basis in system order:
///   0..4  s11, v'1 v'2, v'1 v'3, s22, v'2 v'3   with s_ii = (v'_i^2 - |v'|^2/3)/2
///   5..7  v'_i |v'|^2
///   8     |v'|^4 (entropy polynomial)
/// Only the trace-free stress is matched. With |v'|^2 among the members the
/// Laplacian row is a combination of the stress rows on every Gaussian and L
/// is singular there; energy is put back by the integrator's projection.
struct BasisSet {
  std::array<Polynomial, kMatched> matched;
  Polynomial entropy_poly;
  std::array<Polynomial, 4> conserved;

  static const BasisSet& heat_flux_3d();
  const Polynomial& member(std::size_t a) const { return a < kMatched ? matched[a] : entropy_poly; }

  /// Throws std::logic_error unless matched + entropy are linearly independent.
  void check_rank() const;
};

/// Quadratic members v'_i v'_j (halved on the diagonal), v'_i |v'|^2, |v'|^4.
/// Coefficients of the quadratic members are the entries of c~(1) directly.
/// The cubic baseline is tested against the first nine.
const std::array<Polynomial, kFullStressSystem>& full_stress_members();

/// (i, j) component pairs for the six stress entries.
inline constexpr std::array<std::array<int, 2>, 6> kStressPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

struct DriftCoefficients {
  Vec3 c0{};
  SymMatrix3 c1_sym{};
  Vec3 c2{};
  double c3 = 0.0;
  double c4 = 0.0;
  double tau = 0.0;
  double diffusion = 0.0;

  DriftPolynomial to_drift() const;
  bool finite() const;
  /// Coefficients of the basis polynomials in system order; c1_sym must be
  /// trace-free for these to reproduce the drift.
  linalg::Vector<kSystem> basis_coefficients() const;
};

/// Boltzmann production terms: stress entries in kStressPairs order, then q.
struct ProductionTerms {
  std::array<double, 6> stress{};
  Vec3 heat_flux{};

  std::array<double, 9> as_vector() const;
  /// Production of each matched basis polynomial.
  linalg::Vector<kMatched> for_basis() const;
  /// Production of the first nine full_stress_members().
  linalg::Vector<kFullStressSystem - 1> for_full_stress() const;
};

struct AssembledSystem {
  /// Gram matrix of the basis gradients with the momentum direction removed,
  /// R~ = R - B B^T / rho with B_a = <grad H_a, f>; this is what the solve uses.
  linalg::Matrix<kSystem> R{};
  /// Defining quadratic form <grad H_a . grad H_b, f>.
  linalg::Matrix<kSystem> R_raw{};
  linalg::Vector<kSystem> Q{};
  linalg::Vector<kSystem> G{};
  /// Moment-matching right-hand side and, at kPhi, the entropy target h.
  linalg::Vector<kSystem> b{};
  linalg::Matrix<kSystem> L{};
  double S = 0.0;
  double schur = 0.0;
  double condition = 0.0;
  linalg::Vector<kSystem> c_hat{};
  linalg::Vector<kSystem> c_prime{};
  /// <grad H_a, f> / rho
  std::array<Vec3, kSystem> mean_gradient{};
  /// <v' |v'|^4, f>
  Vec3 stabilizer_flux{};
  double rho = 0.0;
  double tau = 0.0;
  double diffusion = 0.0;
  double c4 = 0.0;
};

/// c_d = eps0 (2 theta0)^2 (m~(4)_0 - 15 rho theta^2)^2 / (15 rho theta^2)^2.
/// Throws DegenerateCellError if theta <= 0.
double stabilization_coefficient(const MomentSet& m, double eps0, double theta0);
/// Same with theta0 set to the local cell temperature.
double stabilization_coefficient(const MomentSet& m, double eps0);

/// Maxwell-molecule relaxation: P_sigma = -(p/mu) sigma, P_q = -(2/3)(p/mu) q,
/// with mu from the model's viscosity law.
ProductionTerms production_terms(const MomentSet& m, const GasModel& model);

AssembledSystem assemble_system(const MomentSet& m, double tau, double diffusion, double c4,
                                const ProductionTerms& production);

/// The same assembly over full_stress_members(). Not solvable (L is singular
/// on Gaussians); kept as the reference the explicit-matrix audit reads.
struct FullStressSystem {
  linalg::Matrix<kFullStressSystem> R{};
  linalg::Vector<kFullStressSystem> Q{};
  linalg::Vector<kFullStressSystem> b{};
};
FullStressSystem assemble_full_stress(const MomentSet& m, double tau, double diffusion, double c4,
                                      const ProductionTerms& production);

/// Solves the split FE-FP systems with one Cholesky factorization of R and a
/// rank-one block downdate for Rbar^{-1}; c0 follows from momentum
/// conservation. Fills the intermediate fields of `sys`.
/// Throws DegenerateCellError when R is not SPD or its 1-norm condition
/// number exceeds `max_condition`.
DriftCoefficients solve_coefficients(AssembledSystem& sys, const MomentSet& m, double max_condition = 1e12);

Vec3 drift_eval(const DriftCoefficients& coeffs, const Vec3& v_prime);

/// The closed-form momentum-conservation constant, for cross-checking the
/// generic c0.
Vec3 c0_closed_form(const DriftCoefficients& coeffs, const MomentSet& m);

/// <sum c_a lap H_a, f> - 30 c_d <|v'|^4, f>, evaluated through polynomial
/// algebra independent of the assembled system.
double fisher_constraint_residual(const DriftCoefficients& coeffs, const MomentSet& m);

/// Cubic-drift baseline
///   A_i = -v'_i/tau + c_ij v'_j + gamma_i (|v'|^2 - 3 theta) + Lambda (v'_i |v'|^2 - 2 q_i / rho).
struct CubicCoefficients {
  SymMatrix3 c{};
  Vec3 gamma{};
  double Lambda = 0.0;
  double tau = 0.0;
  double diffusion = 0.0;
  double theta = 0.0;
  Vec3 q_over_rho{};

  DriftPolynomial to_drift() const;
};

/// Solves the 9x9 weak-consistency system for (c, gamma) with Lambda given.
/// Throws DegenerateCellError on a singular system.
CubicCoefficients cubic_closure(const MomentSet& m, double tau, const ProductionTerms& production, double Lambda);

enum class DriftModel { kLinear, kCubic, kFefp };

/// Highest central-moment order close_cell reads for `model`.
constexpr int required_moment_order(DriftModel model) {
  switch (model) {
    case DriftModel::kFefp: return 7;
    case DriftModel::kCubic: return 5;
    case DriftModel::kLinear: break;
  }
  return 2;
}

struct ClosureOptions {
  double eps0 = 1e-3;
  std::size_t min_particles = 30;
  double max_condition = 1e12;
};

/// Per-cell result consumed by the integrator.
struct CellClosure {
  DriftPolynomial drift;
  double theta = 0.0;
  double tau = 0.0;
  /// true when the requested model was replaced by the linear drift.
  bool fallback = false;
  /// true when no velocity update is possible (theta <= 0).
  bool frozen = false;
  std::optional<DriftCoefficients> fefp;
  std::optional<CubicCoefficients> cubic;
};

CellClosure close_cell(const MomentSet& m, DriftModel model, const GasModel& gas, const ClosureOptions& options);

}  // namespace fefp::closure
