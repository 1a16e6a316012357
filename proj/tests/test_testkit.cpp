#include <doctest.h>

#include <cmath>
#include <vector>

#include "fefp/closure.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/moments.hpp"
#include "fefp/polynomial.hpp"
#include "fefp/rng.hpp"
#include "fefp/testkit/oracles.hpp"
#include "support.hpp"

using namespace fefp;
using fefp::test::diag3;

namespace {

double double_factorial(int k) {
  double r = 1.0;
  for (int j = k; j > 1; j -= 2) r *= j;
  return r;
}

Polynomial heat_flux_h(int i) { return 0.5 * Polynomial::component(i) * Polynomial::norm2_pow(1); }

}  // namespace

TEST_CASE("Gauss-Hermite rule: exact to degree 2n-1, not beyond") {
  for (int n : {4, 12, 16}) {
    const auto& gh = testkit::GaussHermite::standard(n);
    REQUIRE(gh.nodes.size() == std::size_t(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      // rounding scale is the absolute moment sum, which for odd k dwarfs the zero result
      double s = 0, sabs = 0;
      for (int j = 0; j < n; ++j) {
        s += gh.weights[j] * std::pow(gh.nodes[j], k);
        sabs += gh.weights[j] * std::pow(std::abs(gh.nodes[j]), k);
      }
      const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
      CHECK(std::abs(s - exact) <= 1e-12 * std::max(1.0, sabs));
    }
    double s = 0;
    for (int j = 0; j < n; ++j) s += gh.weights[j] * std::pow(gh.nodes[j], 2 * n);
    CHECK(std::abs(s - double_factorial(2 * n - 1)) > 1e-6 * double_factorial(2 * n - 1));
  }
}

TEST_CASE("quadrature expectation examples") {
  const auto unit = testkit::AnalyticDensity::gaussian(diag3(1, 1, 1));
  CHECK(testkit::quadrature_expectation(unit, Polynomial::norm2_pow(2)) == doctest::Approx(15.0).epsilon(1e-13));
  CHECK(testkit::quadrature_expectation(unit, Polynomial::norm2_pow(3)) == doctest::Approx(105.0).epsilon(1e-13));
  const auto mix = testkit::bi_gaussian(0.7, 1.0, 1.0);
  CHECK(std::abs(testkit::quadrature_expectation(mix, Polynomial::component(0))) < 1e-14);
  CHECK(mix.rho() == doctest::Approx(1.0));

  testkit::AnalyticDensity bad = unit;
  bad.components[0].weight = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(testkit::AnalyticDensity::gaussian(diag3(1, 0, 1)), std::invalid_argument);
}

TEST_CASE("quadrature agrees with analytic Gaussian moments to 1e-12 through degree 8") {
  const testkit::Matrix3 Pi{{{1.3, 0.2, -0.1}, {0.2, 0.9, 0.15}, {-0.1, 0.15, 0.8}}};
  const auto f = testkit::AnalyticDensity::gaussian(Pi, 1.4, {0.3, -0.2, 0.5});
  const MomentSet wick = gaussian_central_moments(Pi, 1.4);
  const MomentSet quad = testkit::quadrature_moments(f);
  const double tr = Pi[0][0] + Pi[1][1] + Pi[2][2];
  for (int k = 0; k < kNumMoments; ++k) {
    const MultiIndex a = MomentIndex::at(k);
    const double scale = 1.4 * std::pow(tr, 0.5 * a.order());
    const double w = wick.central[k];
    if (std::abs(w) > 1e-3 * scale) CHECK(quad.central[k] == doctest::Approx(w).epsilon(1e-12));
    else CHECK(std::abs(quad.central[k] - w) <= 1e-12 * scale);
  }
}

TEST_CASE("operator projection examples") {
  const auto f = testkit::AnalyticDensity::gaussian({{{1.0, 0.1, 0.0}, {0.1, 1.0, 0.0}, {0.0, 0.0, 1.0}}});
  DriftPolynomial lin;
  lin.inv_tau = 0.5;
  CHECK(testkit::operator_projection(f, lin, 0.5, Polynomial(1.0)) == 0.0);
  const Polynomial v12 = Polynomial::component(0) * Polynomial::component(1);
  CHECK(testkit::operator_projection(f, lin, 0.5, v12) == doctest::Approx(-0.1).epsilon(1e-12));

  DriftPolynomial any;
  any.inv_tau = 0.3;
  any.cubic = 0.2;
  any.constant = {0.1, 0.2, 0.3};
  CHECK(testkit::operator_projection(f, any, 0.7, Polynomial(1.0)) == 0.0);

  // FE-FP coefficients on an anisotropic Gaussian reproduce the stress production
  const auto s = test::solve_density(testkit::AnalyticDensity::gaussian(diag3(1.5, 1.0, 0.5)), GasModel::maxwell());
  const auto& basis = closure::BasisSet::heat_flux_3d();
  const auto P = s.P.for_basis();
  for (std::size_t a = 0; a < 5; ++a)
    CHECK(std::abs(testkit::operator_projection(s.f, s.c, basis.matched[a]) - P[a]) <=
          1e-8 * test::production_scale(basis.matched[a], s.m, s.tau));
}

TEST_CASE("heat-flux relaxation rate: the linear model has the wrong Prandtl signature") {
  const GasModel gas = GasModel::maxwell();
  const auto f = testkit::bi_gaussian(0.5, 1.2, 0.55);
  const auto s = test::solve_density(f, gas);
  const double q = s.m.heat_flux(0);
  REQUIRE(std::abs(q) > 0.05);
  const auto ts = transport_scales(s.m.theta(), s.m.rho, gas);
  const double target = (2.0 / 3.0) * ts.p / ts.mu;

  DriftPolynomial lin;
  lin.inv_tau = 1.0 / s.tau;
  const double lin_rate = -testkit::operator_projection(f, lin, s.m.theta() / s.tau, heat_flux_h(0)) / q;
  CHECK(lin_rate == doctest::Approx(3.0 / s.tau).epsilon(1e-10));
  CHECK(std::abs(lin_rate - target) > 0.3 * target);

  const double fefp_rate = -testkit::operator_projection(f, s.c, heat_flux_h(0)) / q;
  CHECK(std::abs(fefp_rate - target) <= 1e-8 * target);
}

TEST_CASE("fd_rate") {
  std::vector<double> t, y, c;
  for (int k = 0; k <= 200; ++k) {
    t.push_back(0.01 * k);
    y.push_back(std::exp(-t.back()));
    c.push_back(3.0);
  }
  CHECK(testkit::fd_rate(t, y).rate == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(testkit::fd_rate(t, c).rate) < 1e-12);

  CounterRng rng(6, 0, 0, StreamTag::kTest);
  std::vector<double> noisy;
  for (double x : y) noisy.push_back(x * (1.0 + 0.01 * rng.normal()));
  const auto fit = testkit::fd_rate(t, noisy);
  CHECK(fit.rate == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(fit.stderr_rate > 0.0);
  CHECK(std::abs(fit.rate + 1.0) < 5.0 * fit.stderr_rate);

  y[10] = 0.0;
  CHECK_THROWS_AS(testkit::fd_rate(t, y), std::invalid_argument);
  CHECK_THROWS_AS(testkit::fd_rate(std::span<const double>(t).first(1), std::span<const double>(c).first(1)),
                  std::invalid_argument);
}

TEST_CASE("symmetric eigenvalues") {
  const auto e = testkit::symmetric_eigenvalues({{{2, 1, 0}, {1, 2, 0}, {0, 0, 5}}});
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(3.0));
  CHECK(e[2] == doctest::Approx(5.0));
}
