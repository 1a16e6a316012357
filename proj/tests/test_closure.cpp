#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fefp/closure.hpp"
#include "fefp/error.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/moments.hpp"
#include "fefp/rng.hpp"
#include "fefp/testkit/oracles.hpp"
#include "support.hpp"

using namespace fefp;
using namespace fefp::closure;
using fefp::test::diag3;
using fefp::test::maxwell_moments;

namespace {

GasModel unit_rate_gas() {
  // p / mu = 1 at rho = theta = 1
  GasModel g = GasModel::maxwell();
  g.mu0 = 1.0;
  return g;
}

// skewed mixture with isotropic Pi = I and a heat flux along v1
testkit::AnalyticDensity heat_flux_only_density() {
  testkit::AnalyticDensity f;
  testkit::GaussianComponent a, b;
  a.weight = b.weight = 0.5;
  a.mean = {0.5, 0, 0};
  b.mean = {-0.5, 0, 0};
  a.cov = diag3(0.9, 1.2, 1.2);
  b.cov = diag3(0.6, 0.8, 0.8);
  f.components = {a, b};
  return f;
}

}  // namespace

TEST_CASE("basis: trace-free stress and heat-flux members, entropy member, independent") {
  const BasisSet& b = BasisSet::heat_flux_3d();
  CHECK(b.matched.size() == kMatched);
  for (std::size_t a = 0; a < 5; ++a) CHECK(std::abs(laplacian(b.matched[a]).evaluate(0, 0, 0)) < 1e-15);
  CHECK(b.matched[5] == Polynomial::component(0) * Polynomial::norm2_pow(1));
  CHECK(b.entropy_poly == Polynomial::norm2_pow(2));
  CHECK(b.member(kPhi) == b.entropy_poly);
  CHECK_NOTHROW(b.check_rank());
}

TEST_CASE("stabilization coefficient") {
  const MomentSet eq = maxwell_moments();
  CHECK(stabilization_coefficient(eq, 1e-3) == doctest::Approx(0.0).epsilon(1e-30));

  // rho = theta = 1 with <|v'|^4> = 16.5
  MomentSet m = eq;
  const double scale = 16.5 / 15.0;
  for (int k = 0; k < kNumMoments; ++k)
    if (MomentIndex::at(k).order() == 4) m.central[k] *= scale;
  REQUIRE(m.norm_moment(4) == doctest::Approx(16.5));
  CHECK(stabilization_coefficient(m, 1e-3) == doctest::Approx(4e-5).epsilon(1e-12));

  // velocities scaled by a: invariant with the reference temperature held,
  // a^4 with the local one
  const double a = 1.7;
  MomentSet ms = m;
  for (int k = 0; k < kNumMoments; ++k) ms.central[k] *= std::pow(a, MomentIndex::at(k).order());
  CHECK(stabilization_coefficient(ms, 1e-3, 1.0) == doctest::Approx(stabilization_coefficient(m, 1e-3, 1.0)));
  CHECK(stabilization_coefficient(ms, 1e-3) == doctest::Approx(std::pow(a, 4) * stabilization_coefficient(m, 1e-3)));

  MomentSet cold = eq;
  cold.central.fill(0.0);
  cold.rho = 1.0;
  CHECK_THROWS_AS(stabilization_coefficient(cold, 1e-3), DegenerateCellError);
}

TEST_CASE("production terms") {
  const GasModel g = unit_rate_gas();
  const ProductionTerms zero = production_terms(maxwell_moments(), g);
  for (double s : zero.stress) CHECK(s == doctest::Approx(0.0));
  for (double q : zero.heat_flux) CHECK(q == doctest::Approx(0.0));

  MomentSet m = maxwell_moments();
  m.central[MomentIndex::of(1, 1, 0)] = 0.1;
  m.central[MomentIndex::of(3, 0, 0)] = 0.6;  // q1 = 0.3
  const ProductionTerms P = production_terms(m, g);
  CHECK(P.stress[1] == doctest::Approx(-0.1));
  CHECK(P.heat_flux[0] == doctest::Approx(-0.2));
  // basis form: heat-flux member v1|v|^2 = 2 q1
  CHECK(P.for_basis()[5] == doctest::Approx(-0.4));
  CHECK(P.for_full_stress()[6] == doctest::Approx(-0.4));
  CHECK(P.for_basis()[1] == doctest::Approx(-0.1));
}

TEST_CASE("assembly at the isotropic Maxwellian") {
  const MomentSet m = maxwell_moments();
  const GasModel g = GasModel::maxwell();
  const auto P = production_terms(m, g);
  AssembledSystem sys = assemble_system(m, 1.0, 1.0, 0.0, P);
  CHECK(sys.Q[kPhi] == doctest::Approx(60.0));
  CHECK(sys.R_raw[kPhi][kPhi] == doctest::Approx(1680.0));
  CHECK(sys.G[kPhi] == doctest::Approx(-120.0));
  for (double b : sys.b) CHECK(b == doctest::Approx(0.0).epsilon(1e-13));
  solve_coefficients(sys, m);
  CHECK(sys.schur == doctest::Approx(-15.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("Maxwellian fixed point: drift reduces to -v'/tau") {
  for (double theta : {0.5, 1.0, 3.0}) {
    const MomentSet m = maxwell_moments(1.3, theta);
    const auto cc = close_cell(m, DriftModel::kFefp, GasModel::hard_sphere(), {});
    REQUIRE(cc.fefp);
    CHECK_FALSE(cc.fallback);
    const DriftCoefficients& c = *cc.fefp;
    for (double x : c.c0) CHECK(std::abs(x) < 1e-10);
    for (const auto& row : c.c1_sym)
      for (double x : row) CHECK(std::abs(x) < 1e-10);
    for (double x : c.c2) CHECK(std::abs(x) < 1e-10);
    CHECK(std::abs(c.c3) < 1e-10);
    CHECK(c.c4 == 0.0);
    const Vec3 v{0.3, -1.2, 0.7};
    const Vec3 a = drift_eval(c, v);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(-v[i] / cc.tau).epsilon(1e-10));
  }
}

TEST_CASE("drift evaluation") {
  DriftCoefficients c;
  c.tau = 2.0;
  const Vec3 v{1.0, 2.0, -0.5};
  const Vec3 lin = drift_eval(c, v);
  for (int i = 0; i < 3; ++i) CHECK(lin[i] == doctest::Approx(-v[i] / 2.0));

  c.c0 = {0.1, -0.2, 0.3};
  c.c1_sym = {{{0.1, 0.02, 0.0}, {0.02, -0.05, 0.01}, {0.0, 0.01, -0.05}}};
  c.c2 = {0.01, 0.02, -0.03};
  c.c3 = 0.004;
  c.c4 = 0.002;
  const Vec3 at0 = drift_eval(c, {0, 0, 0});
  for (int i = 0; i < 3; ++i) CHECK(at0[i] == doctest::Approx(c.c0[i]));
  // against the gradient of the potential, by polynomial calculus
  const BasisSet& basis = BasisSet::heat_flux_3d();
  const auto coeff = c.basis_coefficients();
  Polynomial Phi;
  for (std::size_t a = 0; a < kSystem; ++a) Phi += coeff[a] * basis.member(a);
  for (int i = 0; i < 3; ++i) Phi += c.c0[i] * Polynomial::component(i);
  Phi -= (c.c4 / 6.0) * Polynomial::norm2_pow(3);
  Phi -= (0.5 / c.tau) * Polynomial::norm2_pow(1);
  const VectorPoly g = gradient(Phi);
  const Vec3 a = drift_eval(c, v);
  const Vec3 b = c.to_drift().eval(v);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i] == doctest::Approx(g[i].evaluate(v[0], v[1], v[2])).epsilon(1e-13));
    CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-13));
  }
}

TEST_CASE("anisotropic Gaussian: solved drift reproduces the stress production") {
  const auto f = testkit::AnalyticDensity::gaussian(diag3(1.5, 1.0, 0.5));
  const auto s = test::solve_density(f, GasModel::maxwell());
  const auto& basis = BasisSet::heat_flux_3d();
  const auto P = s.P.for_basis();
  for (std::size_t a = 0; a < 5; ++a)
    CHECK(testkit::operator_projection(f, s.c, basis.matched[a]) == doctest::Approx(P[a]).epsilon(1e-8).scale(1.0));
  const Polynomial v3 = Polynomial::component(2);
  const Polynomial s33 = 0.5 * (v3 * v3 - (1.0 / 3.0) * Polynomial::norm2_pow(1));
  CHECK(testkit::operator_projection(f, s.c, s33) == doctest::Approx(0.5 * s.P.stress[5]).epsilon(1e-8).scale(1.0));
  // sigma11 production is -(p/mu) * 0.5 = -1 in reference units
  CHECK(s.P.stress[0] == doctest::Approx(-1.0));
}

TEST_CASE("random mixtures: residuals, momentum, closed-form c0, Schur identity") {
  CounterRng rng(2718, 0, 0, StreamTag::kTest);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = testkit::random_mixture(rng);
    const auto s = test::solve_density(f, trial % 2 ? GasModel::maxwell() : GasModel::hard_sphere());
    CHECK(test::moment_matching_residual(s) < 1e-9);
    CHECK(test::entropy_constraint_residual(s) < 1e-9);
    // independent evaluation of the same constraint through polynomial algebra
    CHECK(std::abs(fisher_constraint_residual(s.c, s.m)) < 1e-9 * s.m.rho / s.tau);

    // <A, f> = 0
    Vec3 mean{};
    testkit::for_each_node(f, [&](const Vec3& v, double w) {
      const Vec3 a = drift_eval(s.c, v);
      for (int i = 0; i < 3; ++i) mean[i] += w * a[i];
    });
    const double vscale = s.m.rho * std::sqrt(s.m.theta()) / s.tau;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i]) < 1e-10 * vscale);

    const Vec3 c0 = c0_closed_form(s.c, s.m);
    for (int i = 0; i < 3; ++i) CHECK(s.c.c0[i] == doctest::Approx(c0[i]).epsilon(1e-9).scale(vscale / s.m.rho));

    // Schur value against -Q_phi^2 (R^-1)_phiphi and the dense determinant ratio
    const auto R = test::to_eigen(s.sys.R);
    const Eigen::Matrix<double, kSystem, kSystem> Rinv = R.inverse();
    const double expect = -s.sys.Q[kPhi] * s.sys.Q[kPhi] * Rinv(kPhi, kPhi);
    CHECK(s.sys.schur == doctest::Approx(expect).epsilon(1e-10));
    const auto L = test::to_eigen(s.sys.L);
    const double det_ratio = L.determinant() / L.topLeftCorner<kMatched, kMatched>().determinant();
    CHECK(s.sys.schur == doctest::Approx(det_ratio).epsilon(1e-8));

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kSystem, kSystem>> es(R);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("block-downdate inverse and Schur path against dense references") {
  CounterRng rng(99, 0, 0, StreamTag::kTest);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = test::solve_density(testkit::random_mixture(rng), GasModel::maxwell());
    const auto R = test::to_eigen(s.sys.R);
    const auto Rbar_inv = linalg::leading_block_inverse(linalg::cholesky_inverse(*linalg::cholesky(s.sys.R)));
    const Eigen::Matrix<double, kMatched, kMatched> direct = R.topLeftCorner<kMatched, kMatched>().inverse();
    const double nrm = direct.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < kMatched; ++i)
      for (std::size_t j = 0; j < kMatched; ++j) CHECK(std::abs(Rbar_inv[i][j] - direct(i, j)) <= 1e-10 * nrm);

    const Eigen::Matrix<double, kSystem, 1> ref = test::to_eigen(s.sys.L).fullPivLu().solve(test::to_eigen(s.sys.b));
    const double cn = ref.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < kSystem; ++i) CHECK(std::abs(s.sys.c_prime[i] - ref(i)) <= 1e-10 * cn);
  }
}

TEST_CASE("cubic baseline") {
  const GasModel g = GasModel::maxwell();
  SUBCASE("Maxwellian gives zero coefficients") {
    const MomentSet m = maxwell_moments();
    const auto c = cubic_closure(m, 1.0, production_terms(m, g), 0.0);
    for (const auto& row : c.c)
      for (double x : row) CHECK(std::abs(x) < 1e-12);
    for (double x : c.gamma) CHECK(std::abs(x) < 1e-12);
  }
  SUBCASE("heat-flux-only density: projected q relaxes at (2/3) p/mu, energy conserved") {
    const auto f = heat_flux_only_density();
    const MomentSet m = testkit::quadrature_moments(f);
    REQUIRE(m.sigma(0, 0) == doctest::Approx(0.0).epsilon(1e-13));
    REQUIRE(m.heat_flux(0) == doctest::Approx(0.2125));
    const auto ts = transport_scales(m.theta(), m.rho, g);
    const double cd = stabilization_coefficient(m, 1e-3);
    const auto P = production_terms(m, g);
    const auto c = cubic_closure(m, ts.tau, P, -kStabilizerToDrift * cd);
    const DriftPolynomial d = c.to_drift();
    const double D = m.theta() / ts.tau;
    const double qrate = testkit::operator_projection(f, d, D, full_stress_members()[6]) / (2.0 * m.heat_flux(0));
    CHECK(qrate == doctest::Approx(-(2.0 / 3.0) * ts.p / ts.mu).epsilon(1e-9));
    CHECK(testkit::operator_projection(f, d, D, Polynomial::norm2_pow(1)) == doctest::Approx(0.0).scale(1.0));
    for (int i = 0; i < 3; ++i)
      CHECK(testkit::operator_projection(f, d, D, Polynomial::component(i)) == doctest::Approx(0.0).scale(1.0));

    // the entropy constraint distinguishes the models
    DriftPolynomial ho = d;
    ho.inv_tau = 0.0;
    const double lhs = testkit::quadrature_expectation(f, divergence(ho.to_poly()));
    const double rhs = kEntropyFactor * cd * testkit::quadrature_expectation(f, Polynomial::norm2_pow(2));
    CHECK(std::abs(lhs - rhs) > 1e-3 * m.rho / ts.tau);
  }
}

TEST_CASE("close_cell: model selection and fallbacks") {
  const GasModel g = GasModel::maxwell();
  const MomentSet eq = maxwell_moments();
  SUBCASE("linear model sets only the relaxation rate") {
    const auto cc = close_cell(eq, DriftModel::kLinear, g, {});
    CHECK(cc.drift.inv_tau == doctest::Approx(1.0 / cc.tau));
    CHECK(cc.tau == doctest::Approx(1.0));
    CHECK_FALSE(cc.fefp);
    CHECK_FALSE(cc.fallback);
  }
  SUBCASE("too few samples") {
    MomentSet m = eq;
    m.sample_count = 12;
    const auto cc = close_cell(m, DriftModel::kFefp, g, {});
    CHECK(cc.fallback);
    CHECK_FALSE(cc.fefp);
  }
  SUBCASE("zero temperature freezes the cell") {
    MomentSet m = eq;
    m.central.fill(0.0);
    m.central[0] = 1.0;
    const auto cc = close_cell(m, DriftModel::kCubic, g, {});
    CHECK(cc.frozen);
  }
  SUBCASE("collinear velocities give a singular system and fall back") {
    // grad(v2 v3) vanishes on the sample
    std::vector<double> vx(200), vy(200, 0.0), vz(200, 0.0);
    CounterRng rng(1, 0, 0, StreamTag::kTest);
    for (std::size_t p = 0; p < 200; ++p) vx[p] = rng.normal();
    const MomentSet m = estimate_central_moments(vx, vy, vz, 1.0);
    const auto cc = close_cell(m, DriftModel::kFefp, g, {});
    CHECK(cc.fallback);
    CHECK(cc.drift.quintic == 0.0);
  }
  SUBCASE("ill-conditioned system is refused above the threshold") {
    ClosureOptions opt;
    opt.max_condition = 2.0;
    const auto cc = close_cell(eq, DriftModel::kFefp, g, opt);
    CHECK(cc.fallback);
  }
  SUBCASE("truncated moments are a programming error") {
    MomentSet m = eq;
    m.max_order = 5;
    CHECK_THROWS_AS(close_cell(m, DriftModel::kFefp, g, {}), std::invalid_argument);
    CHECK_NOTHROW(close_cell(m, DriftModel::kCubic, g, {}));
  }
}
