#include "fefp/closure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fefp/error.hpp"

namespace fefp::closure {

namespace {

using linalg::Matrix;
using linalg::Vector;

VectorPoly position_field() { return {Polynomial::component(0), Polynomial::component(1), Polynomial::component(2)}; }

VectorPoly scaled(const VectorPoly& f, const Polynomial& s) { return {f[0] * s, f[1] * s, f[2] * s}; }

// Everything the assemblies need, compiled once into sparse functionals.
template <std::size_t N>
struct Compiled {
  std::array<VectorPoly, N> grad;
  std::array<std::array<MomentFunctional, N>, N> gram;
  std::array<std::array<MomentFunctional, 3>, N> mean_grad;
  std::array<MomentFunctional, N> lap;
  std::array<MomentFunctional, N> v_dot_grad;
  std::array<MomentFunctional, N> stab_dot_grad;
  std::array<MomentFunctional, 3> stab_flux;
  MomentFunctional r4;

  explicit Compiled(const std::array<Polynomial, N>& members) {
    const VectorPoly v = position_field();
    const VectorPoly stab = scaled(v, Polynomial::norm2_pow(2));
    for (std::size_t a = 0; a < N; ++a) grad[a] = gradient(members[a]);
    for (std::size_t a = 0; a < N; ++a) {
      for (std::size_t b = 0; b < N; ++b) gram[a][b] = MomentFunctional(dot(grad[a], grad[b]));
      for (std::size_t i = 0; i < 3; ++i) mean_grad[a][i] = MomentFunctional(grad[a][i]);
      lap[a] = MomentFunctional(laplacian(members[a]));
      v_dot_grad[a] = MomentFunctional(dot(v, grad[a]));
      stab_dot_grad[a] = MomentFunctional(dot(stab, grad[a]));
    }
    for (std::size_t i = 0; i < 3; ++i) stab_flux[i] = MomentFunctional(stab[i]);
    r4 = MomentFunctional(Polynomial::norm2_pow(2));
  }
};

// the cubic baseline additionally needs |v'|^2 grad H and v'|v'|^2 . grad H
struct CubicExtra {
  std::array<std::array<MomentFunctional, 3>, kFullStressSystem - 1> grad_r2;
  std::array<MomentFunctional, kFullStressSystem - 1> cubic_dot_grad;

  explicit CubicExtra(const Compiled<kFullStressSystem>& k) {
    const VectorPoly cub = scaled(position_field(), Polynomial::norm2_pow(1));
    for (std::size_t a = 0; a + 1 < kFullStressSystem; ++a) {
      for (std::size_t i = 0; i < 3; ++i) grad_r2[a][i] = MomentFunctional(k.grad[a][i] * Polynomial::norm2_pow(1));
      cubic_dot_grad[a] = MomentFunctional(dot(cub, k.grad[a]));
    }
  }
};

const Compiled<kSystem>& compiled() {
  static const Compiled<kSystem> c = [] {
    const BasisSet& basis = BasisSet::heat_flux_3d();
    std::array<Polynomial, kSystem> members;
    for (std::size_t a = 0; a < kSystem; ++a) members[a] = basis.member(a);
    return Compiled<kSystem>(members);
  }();
  return c;
}

const Compiled<kFullStressSystem>& compiled_full() {
  static const Compiled<kFullStressSystem> c(full_stress_members());
  return c;
}

const CubicExtra& cubic_extra() {
  static const CubicExtra c(compiled_full());
  return c;
}

template <std::size_t N>
struct Generic {
  Matrix<N> R{}, R_raw{};
  Vector<N> Q{}, b{};
  std::array<Vec3, N> mean_gradient{};
  Vec3 stabilizer_flux{};
};

// Rows 0..N-2 are moment matching with production p, row N-1 the entropy target.
template <std::size_t N>
Generic<N> assemble_generic(const Compiled<N>& k, const MomentSet& m, double tau, double diffusion, double c4,
                            const Vector<N - 1>& p) {
  Generic<N> g;
  for (std::size_t i = 0; i < 3; ++i) g.stabilizer_flux[i] = k.stab_flux[i](m);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t i = 0; i < 3; ++i) g.mean_gradient[a][i] = k.mean_grad[a][i](m) / m.rho;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b) {
      const double raw = k.gram[a][b](m);
      double corr = 0.0;
      for (std::size_t i = 0; i < 3; ++i) corr += g.mean_gradient[a][i] * g.mean_gradient[b][i];
      g.R_raw[a][b] = g.R_raw[b][a] = raw;
      g.R[a][b] = g.R[b][a] = raw - m.rho * corr;
    }
  for (std::size_t a = 0; a < N; ++a) g.Q[a] = k.lap[a](m);
  for (std::size_t a = 0; a + 1 < N; ++a) {
    double centred = k.stab_dot_grad[a](m);
    for (std::size_t i = 0; i < 3; ++i) centred -= g.mean_gradient[a][i] * g.stabilizer_flux[i];
    g.b[a] = p[a] + k.v_dot_grad[a](m) / tau - diffusion * g.Q[a] + c4 * centred;
  }
  g.b[N - 1] = kEntropyFactor * (c4 / kStabilizerToDrift) * k.r4(m);
  return g;
}

double require_theta(const MomentSet& m) {
  const double theta = m.theta();
  if (!(theta > 0.0) || !(m.rho > 0.0)) throw DegenerateCellError("non-positive temperature or density");
  return theta;
}

}  // namespace

const BasisSet& BasisSet::heat_flux_3d() {
  static const BasisSet basis = [] {
    BasisSet b;
    const Polynomial third = (1.0 / 3.0) * Polynomial::norm2_pow(1);
    std::size_t k = 0;
    for (const auto& [i, j] : kStressPairs) {
      if (i == 2 && j == 2) continue;
      const Polynomial p = Polynomial::component(i) * Polynomial::component(j);
      b.matched[k++] = i == j ? 0.5 * (p - third) : p;
    }
    for (int i = 0; i < 3; ++i) b.matched[k++] = Polynomial::component(i) * Polynomial::norm2_pow(1);
    b.entropy_poly = Polynomial::norm2_pow(2);
    b.conserved = {Polynomial(1.0), Polynomial::component(0), Polynomial::component(1), Polynomial::component(2)};
    b.check_rank();
    return b;
  }();
  return basis;
}

const std::array<Polynomial, kFullStressSystem>& full_stress_members() {
  static const std::array<Polynomial, kFullStressSystem> members = [] {
    std::array<Polynomial, kFullStressSystem> out;
    std::size_t k = 0;
    for (const auto& [i, j] : kStressPairs) {
      const Polynomial p = Polynomial::component(i) * Polynomial::component(j);
      out[k++] = i == j ? 0.5 * p : p;
    }
    for (int i = 0; i < 3; ++i) out[k++] = Polynomial::component(i) * Polynomial::norm2_pow(1);
    out[k] = Polynomial::norm2_pow(2);
    return out;
  }();
  return members;
}

void BasisSet::check_rank() const {
  // Gram matrix of coefficient vectors; independent iff SPD.
  Matrix<kSystem> g{};
  for (std::size_t a = 0; a < kSystem; ++a)
    for (std::size_t b = 0; b < kSystem; ++b) {
      double s = 0.0;
      for (const auto& [alpha, c] : member(a).terms()) s += c * member(b).coeff(alpha);
      g[a][b] = s;
    }
  if (!linalg::cholesky(g)) throw std::logic_error("basis polynomials are linearly dependent");
}

DriftPolynomial DriftCoefficients::to_drift() const {
  DriftPolynomial d;
  d.constant = c0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) d.linear[3 * i + j] = c1_sym[i][j];
  d.quad_norm = c2;
  for (std::size_t i = 0; i < 3; ++i) d.quad_proj[i] = 2.0 * c2[i];
  d.cubic = 4.0 * c3;
  d.quintic = c4;
  d.inv_tau = 1.0 / tau;
  return d;
}

bool DriftCoefficients::finite() const {
  bool ok = std::isfinite(c3) && std::isfinite(c4) && std::isfinite(tau) && std::isfinite(diffusion);
  for (std::size_t i = 0; i < 3; ++i) {
    ok = ok && std::isfinite(c0[i]) && std::isfinite(c2[i]);
    for (std::size_t j = 0; j < 3; ++j) ok = ok && std::isfinite(c1_sym[i][j]);
  }
  return ok;
}

Vector<kSystem> DriftCoefficients::basis_coefficients() const {
  // C = a (e1e1 - I/3) + b (e2e2 - I/3) + off-diagonals, so a = C11 - C33, b = C22 - C33
  Vector<kSystem> c{};
  c[0] = c1_sym[0][0] - c1_sym[2][2];
  c[1] = c1_sym[0][1];
  c[2] = c1_sym[0][2];
  c[3] = c1_sym[1][1] - c1_sym[2][2];
  c[4] = c1_sym[1][2];
  for (std::size_t i = 0; i < 3; ++i) c[5 + i] = c2[i];
  c[kPhi] = c3;
  return c;
}

std::array<double, 9> ProductionTerms::as_vector() const {
  return {stress[0], stress[1], stress[2], stress[3], stress[4], stress[5], heat_flux[0], heat_flux[1], heat_flux[2]};
}

Vector<kMatched> ProductionTerms::for_basis() const {
  // sigma is trace-free, so s_ii produces half of P_sigma_ii
  const Vector<kFullStressSystem - 1> full = for_full_stress();
  Vector<kMatched> p{};
  for (std::size_t k = 0; k < 5; ++k) p[k] = full[k];
  for (std::size_t i = 0; i < 3; ++i) p[5 + i] = full[6 + i];
  return p;
}

Vector<kFullStressSystem - 1> ProductionTerms::for_full_stress() const {
  Vector<kFullStressSystem - 1> p{};
  for (std::size_t k = 0; k < 6; ++k) p[k] = kStressPairs[k][0] == kStressPairs[k][1] ? 0.5 * stress[k] : stress[k];
  // v'_i |v'|^2 = 2 q_i
  for (std::size_t i = 0; i < 3; ++i) p[6 + i] = 2.0 * heat_flux[i];
  return p;
}

double stabilization_coefficient(const MomentSet& m, double eps0, double theta0) {
  const double theta = require_theta(m);
  if (!(theta0 > 0.0)) throw DegenerateCellError("non-positive reference temperature");
  const double eq = 15.0 * m.rho * theta * theta;
  const double excess = m.norm_moment(4) - eq;
  const double scale = 2.0 * theta0;
  return eps0 * scale * scale * excess * excess / (eq * eq);
}

double stabilization_coefficient(const MomentSet& m, double eps0) {
  return stabilization_coefficient(m, eps0, require_theta(m));
}

ProductionTerms production_terms(const MomentSet& m, const GasModel& model) {
  const double theta = require_theta(m);
  const TransportScales ts = transport_scales(theta, m.rho, model);
  const double rate = ts.p / ts.mu;
  ProductionTerms out;
  for (std::size_t k = 0; k < 6; ++k) out.stress[k] = -rate * m.sigma(kStressPairs[k][0], kStressPairs[k][1]);
  for (int i = 0; i < 3; ++i) out.heat_flux[static_cast<std::size_t>(i)] = -(2.0 / 3.0) * rate * m.heat_flux(i);
  return out;
}

AssembledSystem assemble_system(const MomentSet& m, double tau, double diffusion, double c4,
                                const ProductionTerms& production) {
  require_theta(m);
  const Generic<kSystem> g = assemble_generic(compiled(), m, tau, diffusion, c4, production.for_basis());
  AssembledSystem sys;
  sys.rho = m.rho;
  sys.tau = tau;
  sys.diffusion = diffusion;
  sys.c4 = c4;
  sys.R = g.R;
  sys.R_raw = g.R_raw;
  sys.Q = g.Q;
  sys.b = g.b;
  sys.mean_gradient = g.mean_gradient;
  sys.stabilizer_flux = g.stabilizer_flux;
  sys.G[kPhi] = -2.0 * sys.Q[kPhi];
  return sys;
}

FullStressSystem assemble_full_stress(const MomentSet& m, double tau, double diffusion, double c4,
                                      const ProductionTerms& production) {
  require_theta(m);
  const auto g = assemble_generic(compiled_full(), m, tau, diffusion, c4, production.for_full_stress());
  return {g.R, g.Q, g.b};
}

DriftCoefficients solve_coefficients(AssembledSystem& sys, const MomentSet& m, double max_condition) {
  const auto chol = linalg::cholesky(sys.R);
  if (!chol) throw DegenerateCellError("R is not positive definite");
  const Matrix<kSystem> Rinv = linalg::cholesky_inverse(*chol);
  sys.condition = linalg::norm1(sys.R) * linalg::norm1(Rinv);
  if (!(sys.condition <= max_condition))
    throw DegenerateCellError("R condition number " + std::to_string(sys.condition) + " above threshold");

  Vector<kSystem> qg{};
  for (std::size_t a = 0; a < kSystem; ++a) qg[a] = sys.Q[a] + sys.G[a];
  sys.c_hat = linalg::matvec(Rinv, qg);
  sys.S = linalg::dot(sys.c_hat, sys.Q);

  const Matrix<kMatched> Rbar_inv = linalg::leading_block_inverse(Rinv);
  Vector<kMatched> qbar{}, bbar{};
  for (std::size_t a = 0; a < kMatched; ++a) {
    qbar[a] = sys.Q[a];
    bbar[a] = sys.b[a];
  }
  const Vector<kMatched> y = linalg::matvec(Rbar_inv, bbar);
  const Vector<kMatched> z = linalg::matvec(Rbar_inv, qbar);
  sys.schur = sys.S - linalg::dot(qbar, z);
  if (!(std::abs(sys.schur) > 0.0) || !std::isfinite(sys.schur)) throw DegenerateCellError("vanishing Schur complement");
  const double cphi = (sys.b[kPhi] - linalg::dot(qbar, y)) / sys.schur;
  for (std::size_t a = 0; a < kMatched; ++a) sys.c_prime[a] = y[a] - z[a] * cphi;
  sys.c_prime[kPhi] = cphi;

  for (std::size_t a = 0; a < kSystem; ++a)
    for (std::size_t b = 0; b < kSystem; ++b) {
      if (a < kMatched && b < kMatched) sys.L[a][b] = sys.R[a][b];
      else if (a == kPhi && b == kPhi) sys.L[a][b] = sys.S;
      else sys.L[a][b] = sys.Q[a == kPhi ? b : a];
    }

  Vector<kSystem> c{};
  for (std::size_t a = 0; a < kMatched; ++a) c[a] = sys.c_prime[a] + cphi * sys.c_hat[a];
  c[kPhi] = cphi * sys.c_hat[kPhi];

  DriftCoefficients out;
  out.c1_sym[0][0] = (2.0 * c[0] - c[3]) / 3.0;
  out.c1_sym[1][1] = (2.0 * c[3] - c[0]) / 3.0;
  out.c1_sym[2][2] = -(c[0] + c[3]) / 3.0;
  out.c1_sym[0][1] = out.c1_sym[1][0] = c[1];
  out.c1_sym[0][2] = out.c1_sym[2][0] = c[2];
  out.c1_sym[1][2] = out.c1_sym[2][1] = c[4];
  for (std::size_t i = 0; i < 3; ++i) out.c2[i] = c[5 + i];
  out.c3 = c[kPhi];
  out.c4 = sys.c4;
  out.tau = sys.tau;
  out.diffusion = sys.diffusion;
  // momentum: rho c0 + sum c_a <grad H_a> - c4 <v'|v'|^4> = 0
  for (std::size_t i = 0; i < 3; ++i) {
    double s = sys.c4 * sys.stabilizer_flux[i] / m.rho;
    for (std::size_t a = 0; a < kSystem; ++a) s -= c[a] * sys.mean_gradient[a][i];
    out.c0[i] = s;
  }
  return out;
}

Vec3 drift_eval(const DriftCoefficients& coeffs, const Vec3& v_prime) { return coeffs.to_drift().eval(v_prime); }

Vec3 c0_closed_form(const DriftCoefficients& coeffs, const MomentSet& m) {
  const double r2 = m.norm_moment(2);
  Vec3 c0{};
  for (int i = 0; i < 3; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double s = -coeffs.c2[ui] * r2 - 8.0 * coeffs.c3 * m.heat_flux(i) + coeffs.c4 * m.vector_moment(i, 4);
    for (int k = 0; k < 3; ++k) s -= 2.0 * coeffs.c2[static_cast<std::size_t>(k)] * m.Pi(k, i);
    c0[ui] = s / m.rho;
  }
  return c0;
}

double fisher_constraint_residual(const DriftCoefficients& coeffs, const MomentSet& m) {
  const BasisSet& basis = BasisSet::heat_flux_3d();
  const Vector<kSystem> c = coeffs.basis_coefficients();
  Polynomial potential;
  for (std::size_t a = 0; a < kSystem; ++a) potential += c[a] * basis.member(a);
  const double lhs = expectation(laplacian(potential), m);
  return lhs - kEntropyFactor * (coeffs.c4 / kStabilizerToDrift) * m.norm_moment(4);
}

DriftPolynomial CubicCoefficients::to_drift() const {
  DriftPolynomial d;
  for (std::size_t i = 0; i < 3; ++i) {
    d.constant[i] = -3.0 * theta * gamma[i] - 2.0 * Lambda * q_over_rho[i];
    for (std::size_t j = 0; j < 3; ++j) d.linear[3 * i + j] = c[i][j];
  }
  d.quad_norm = gamma;
  d.cubic = Lambda;
  d.inv_tau = 1.0 / tau;
  return d;
}

CubicCoefficients cubic_closure(const MomentSet& m, double tau, const ProductionTerms& production, double Lambda) {
  const double theta = require_theta(m);
  const auto& k = compiled_full();
  const CubicExtra& x = cubic_extra();
  constexpr std::size_t kN = kFullStressSystem - 1;
  CubicCoefficients out;
  out.Lambda = Lambda;
  out.tau = tau;
  out.theta = theta;
  out.diffusion = theta / tau;
  for (int i = 0; i < 3; ++i) out.q_over_rho[static_cast<std::size_t>(i)] = m.heat_flux(i) / m.rho;

  // unknowns: six c entries (fields = gradients of the quadratic basis), then gamma
  Matrix<kN> A{};
  Vector<kN> rhs{};
  const Vector<kN> p = production.for_full_stress();
  for (std::size_t a = 0; a < kN; ++a) {
    Vec3 mean{};
    for (std::size_t i = 0; i < 3; ++i) mean[i] = k.mean_grad[a][i](m);
    for (std::size_t b = 0; b < 6; ++b) A[a][b] = k.gram[a][b](m);
    for (std::size_t i = 0; i < 3; ++i) A[a][6 + i] = x.grad_r2[a][i](m) - 3.0 * theta * mean[i];
    double lam = x.cubic_dot_grad[a](m);
    for (std::size_t i = 0; i < 3; ++i) lam -= 2.0 * out.q_over_rho[i] * mean[i];
    rhs[a] = p[a] + k.v_dot_grad[a](m) / tau - out.diffusion * k.lap[a](m) - Lambda * lam;
  }
  const auto sol = linalg::lu_solve(A, rhs);
  if (!sol) throw DegenerateCellError("singular cubic-drift system");
  std::size_t idx = 0;
  for (const auto& [i, j] : kStressPairs) {
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    out.c[ui][uj] = out.c[uj][ui] = (*sol)[idx++];
  }
  for (std::size_t i = 0; i < 3; ++i) out.gamma[i] = (*sol)[6 + i];
  return out;
}

CellClosure close_cell(const MomentSet& m, DriftModel model, const GasModel& gas, const ClosureOptions& options) {
  if (m.max_order < required_moment_order(model))
    throw std::invalid_argument("close_cell: moment set truncated below the order the model needs");
  CellClosure out;
  out.theta = m.theta();
  if (!(out.theta > 0.0) || !(m.rho > 0.0) || !std::isfinite(out.theta)) {
    out.frozen = true;
    out.fallback = model != DriftModel::kLinear;
    return out;
  }
  const TransportScales ts = transport_scales(out.theta, m.rho, gas);
  out.tau = ts.tau;
  out.drift.inv_tau = 1.0 / ts.tau;
  if (model == DriftModel::kLinear) return out;
  // sample_count == 0 marks analytic moments
  if (m.sample_count != 0 && m.sample_count < options.min_particles) {
    out.fallback = true;
    return out;
  }
  const double diffusion = out.theta / ts.tau;
  try {
    const double cd = stabilization_coefficient(m, options.eps0, out.theta);
    const ProductionTerms p = production_terms(m, gas);
    if (model == DriftModel::kFefp) {
      AssembledSystem sys = assemble_system(m, ts.tau, diffusion, kStabilizerToDrift * cd, p);
      DriftCoefficients c = solve_coefficients(sys, m, options.max_condition);
      if (!c.finite()) throw DegenerateCellError("non-finite coefficients");
      out.drift = c.to_drift();
      out.fefp = c;
    } else {
      CubicCoefficients c = cubic_closure(m, ts.tau, p, -kStabilizerToDrift * cd);
      const DriftPolynomial d = c.to_drift();
      bool ok = std::isfinite(d.cubic);
      for (double x : d.linear) ok = ok && std::isfinite(x);
      for (std::size_t i = 0; i < 3; ++i) ok = ok && std::isfinite(d.constant[i]) && std::isfinite(d.quad_norm[i]);
      if (!ok) throw DegenerateCellError("non-finite coefficients");
      out.drift = d;
      out.cubic = c;
    }
  } catch (const DegenerateCellError&) {
    out.drift = DriftPolynomial{};
    out.drift.inv_tau = 1.0 / ts.tau;
    out.fallback = true;
  }
  return out;
}

}  // namespace fefp::closure
