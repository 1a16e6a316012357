#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fefp/closure.hpp"
#include "fefp/integrator.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/moments.hpp"
#include "fefp/rng.hpp"
#include "fefp/simd/kernels.hpp"

using namespace fefp;

namespace {

struct Cell {
  std::vector<double> vx, vy, vz;
  std::vector<std::uint64_t> id;

  explicit Cell(std::size_t n, std::uint64_t seed = 1, double theta = 1.0, Vec3 U = {0, 0, 0}) : vx(n), vy(n), vz(n), id(n) {
    sample_maxwellian(U, theta, seed, vx, vy, vz);
    std::iota(id.begin(), id.end(), 0);
  }
  CellVelocities view() { return {vx, vy, vz, id}; }
  double var(const std::vector<double>& v) const {
    double m = 0, s = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return s / v.size();
  }
};

}  // namespace

TEST_CASE("step parameters carry the exact OU variance") {
  const auto p = StepParams::make(0.3, 1.5, 2.0);
  CHECK(p.s == doctest::Approx(0.2));
  CHECK(p.decay == doctest::Approx(std::exp(-0.2)));
  CHECK(p.noise_std * p.noise_std == doctest::Approx(2.0 * (1.0 - std::exp(-0.4))));
  CHECK_THROWS_AS(StepParams::make(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepParams::make(0.1, 0.0, 1.0), std::invalid_argument);
  // small-s accuracy of the noise amplitude
  const auto q = StepParams::make(1e-12, 1.0, 1.0);
  CHECK(q.noise_std * q.noise_std == doctest::Approx(2e-12).epsilon(1e-9));
}

TEST_CASE("linear drift: raw scheme reaches the OU stationary variance") {
  for (double s : {0.1, 1.0, 5.0}) {
    Cell c(100000, 7);
    // start far from equilibrium, anisotropic and drifting
    for (std::size_t p = 0; p < c.vx.size(); ++p) {
      c.vx[p] = 0.3 * c.vx[p] + 2.0;
      c.vy[p] *= 1.8;
    }
    DriftPolynomial lin;
    lin.inv_tau = 1.0;
    const int burn = static_cast<int>(std::ceil(12.0 / s));
    double acc[3] = {0, 0, 0};
    const int avg = 200;
    for (int k = 0; k < burn + avg; ++k) {
      advance_cell_velocities(c.view(), lin, 1.0, 1.0, s, {11, static_cast<std::uint64_t>(k), false});
      if (k >= burn) {
        acc[0] += c.var(c.vx);
        acc[1] += c.var(c.vy);
        acc[2] += c.var(c.vz);
      }
    }
    for (double a : acc) CHECK(a / avg == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("projection conserves momentum and fluctuation energy to roundoff") {
  Cell c(5000, 3, 1.7, {1.0, -4.0, 0.5});
  DriftPolynomial d;
  d.inv_tau = 0.8;
  d.constant = {0.05, -0.02, 0.01};
  d.linear = {0.1, 0.02, 0, 0.02, -0.05, 0.01, 0, 0.01, -0.05};
  d.quad_norm = {0.01, 0.0, -0.02};
  d.quad_proj = {0.02, 0.0, -0.04};
  d.cubic = 0.01;
  d.quintic = 0.002;
  for (int k = 0; k < 50; ++k) {
    CellAudit a;
    advance_cell_velocities(c.view(), d, 1.7, 1.25, 0.05, {5, static_cast<std::uint64_t>(k), true}, &a);
    const double pscale = std::sqrt(c.vx.size() * a.energy_before);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a.momentum_after[i] - a.momentum_before[i]) <= 1e-12 * pscale);
    CHECK(std::abs(a.energy_after - a.energy_before) <= 1e-12 * a.energy_before);
  }
}

TEST_CASE("cells with fewer than two particles are untouched") {
  Cell c(1, 2);
  const double v0 = c.vx[0];
  DriftPolynomial d;
  d.inv_tau = 1.0;
  advance_cell_velocities(c.view(), d, 1.0, 1.0, 0.1, {1, 1, true});
  CHECK(c.vx[0] == v0);
  Cell z(10, 2);
  const auto before = z.vx;
  advance_cell_velocities(z.view(), d, 0.0, 1.0, 0.1, {1, 1, true});
  CHECK(z.vx == before);
}

TEST_CASE("small-s limit approaches Euler-Maruyama") {
  // deterministic part: e^{-s} v + N(v) dt against v + (-v/tau + N(v)) dt, error O(s^2)
  DriftPolynomial d;
  d.inv_tau = 1.0;
  d.constant = {0.1, 0.0, 0.0};
  d.cubic = 0.05;
  d.quad_norm = {0.02, 0.01, 0.0};
  const auto& k = simd::scalar_kernels();
  const double U[3] = {0, 0, 0};
  auto err = [&](double s, double inv_tame) {
    double vx[4] = {0.5, -1.0, 1.5, 0.2}, vy[4] = {0.3, 0.8, -0.4, 1.1}, vz[4] = {-0.2, 0.4, 0.9, -1.3};
    const double ex[4] = {0.5, -1.0, 1.5, 0.2}, ey[4] = {0.3, 0.8, -0.4, 1.1}, ez[4] = {-0.2, 0.4, 0.9, -1.3};
    const double zero[4] = {0, 0, 0, 0};
    double sums[3];
    const auto sp = StepParams::make(s, 1.0, 1.0);
    k.velocity_half_step(vx, vy, vz, zero, zero, zero, 4, U, d, sp.decay, sp.dt, 0.0, inv_tame, sums);
    double worst = 0;
    for (int p = 0; p < 4; ++p) {
      const Vec3 a = d.eval({ex[p], ey[p], ez[p]});
      worst = std::max(worst, std::abs(vx[p] - (ex[p] + a[0] * s)));
      worst = std::max(worst, std::abs(vy[p] - (ey[p] + a[1] * s)));
      worst = std::max(worst, std::abs(vz[p] - (ez[p] + a[2] * s)));
    }
    return worst;
  };
  for (const double inv_tame : {0.0, 1.0}) {
    const double e1 = err(1e-2, inv_tame), e2 = err(5e-3, inv_tame);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
  }
  // stochastic part: noise variance / (2 theta s) -> 1 with O(s) error
  for (double s : {1e-2, 1e-3, 1e-4}) {
    const auto sp = StepParams::make(s, 1.0, 1.0);
    CHECK(std::abs(sp.noise_std * sp.noise_std / (2.0 * s) - 1.0) <= 1.01 * s);
  }
}

TEST_CASE("frozen destabilising coefficients stay bounded with the stabiliser") {
  Cell c(10000, 21);
  DriftPolynomial d;
  d.inv_tau = 1.0;
  d.cubic = 0.2;   // pushes outward
  d.quintic = 0.05;
  double worst = 0;
  for (int k = 0; k < 2000; ++k) {
    advance_cell_velocities(c.view(), d, 1.0, 1.0, 0.02, {4, static_cast<std::uint64_t>(k), false});
    double m2 = 0;
    for (std::size_t p = 0; p < c.vx.size(); ++p) m2 += c.vx[p] * c.vx[p] + c.vy[p] * c.vy[p] + c.vz[p] * c.vz[p];
    m2 /= c.vx.size();
    REQUIRE(std::isfinite(m2));
    worst = std::max(worst, m2);
  }
  CHECK(worst < 50.0);
}

TEST_CASE("Maxwellian is a fixed point of the FE-FP update") {
  const std::size_t N = 20000;
  const GasModel g = GasModel::maxwell();
  // spread of the solved stress coefficients over independent samples
  std::vector<double> c11;
  for (std::uint64_t r = 0; r < 20; ++r) {
    Cell c(N, 1000 + r);
    const MomentSet m = estimate_central_moments(c.vx, c.vy, c.vz, 1.0);
    c11.push_back(closure::close_cell(m, closure::DriftModel::kFefp, g, {}).fefp->c1_sym[0][0]);
  }
  double sd = 0;
  for (double x : c11) sd += x * x;
  sd = std::sqrt(sd / c11.size());

  Cell c(N, 77);
  const double theta0 = estimate_central_moments(c.vx, c.vy, c.vz, 1.0).theta();
  for (int k = 0; k < 1000; ++k) {
    const MomentSet m = estimate_central_moments(c.vx, c.vy, c.vz, 1.0);
    const auto cc = closure::close_cell(m, closure::DriftModel::kFefp, g, {});
    REQUIRE(cc.fefp);
    advance_cell_velocities(c.view(), cc.drift, cc.theta, cc.tau, 0.01, {77, static_cast<std::uint64_t>(k), true});
  }
  const MomentSet m = estimate_central_moments(c.vx, c.vy, c.vz, 1.0);
  const auto cc = closure::close_cell(m, closure::DriftModel::kFefp, g, {});
  CHECK(std::abs(cc.fefp->c1_sym[0][0]) < 5.0 * sd);
  CHECK(m.theta() == doctest::Approx(theta0).epsilon(0.005));
}

TEST_CASE("streaming") {
  ParticleArrays p;
  p.push_back(0.0, 0.0, {1.0, 0.0, 0.0}, 0);
  p.push_back(1.0, 2.0, {-0.3, 0.7, 5.0}, 1);
  const auto x0 = p.x, y0 = p.y;
  stream(p, 0.0);
  CHECK(p.x == x0);
  CHECK(p.y == y0);
  stream(p, 0.5);
  CHECK(p.x[0] == 0.5);
  CHECK(p.y[0] == 0.0);
  for (auto& v : p.vx) v = -v;
  for (auto& v : p.vy) v = -v;
  stream(p, 0.5);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(std::abs(p.x[k] - x0[k]) <= 1e-15);
    CHECK(std::abs(p.y[k] - y0[k]) <= 1e-15);
  }
}
