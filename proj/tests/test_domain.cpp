#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "fefp/domain.hpp"
#include "fefp/integrator.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/rng.hpp"

using namespace fefp;

namespace {

BoundarySpec box(double Lx, double Ly, EdgeKind all) {
  BoundarySpec s;
  s.Lx = Lx;
  s.Ly = Ly;
  s.edges = {all, all, all, all};
  return s;
}

ParticleArrays uniform_gas(std::size_t n, double Lx, double Ly, const Vec3& U, double theta, std::uint64_t seed) {
  ParticleArrays p;
  p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    CounterRng rng(seed, 0, k, StreamTag::kInitialPosition);
    p.x[k] = rng.uniform() * Lx;
    p.y[k] = rng.uniform() * Ly;
    p.id[k] = k;
  }
  sample_maxwellian(U, theta, seed, p.vx, p.vy, p.vz);
  return p;
}

struct Bulk {
  double n = 0, U[3] = {0, 0, 0}, theta = 0;
};

Bulk bulk(const ParticleArrays& p, double weight, double area) {
  Bulk b;
  const double N = static_cast<double>(p.size());
  b.n = N * weight / area;
  double s2 = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    b.U[0] += p.vx[k];
    b.U[1] += p.vy[k];
    b.U[2] += p.vz[k];
    s2 += p.vx[k] * p.vx[k] + p.vy[k] * p.vy[k] + p.vz[k] * p.vz[k];
  }
  for (double& u : b.U) u /= N;
  b.theta = (s2 / N - b.U[0] * b.U[0] - b.U[1] * b.U[1] - b.U[2] * b.U[2]) / 3.0;
  return b;
}

}  // namespace

TEST_CASE("binning: centre, faces, far faces and out-of-domain") {
  Grid2D g(8, 6, 4.0, 3.0);
  CHECK(g.cell_of(2.0, 1.5) == 3u * 8u + 4u);
  CHECK(g.cell_of(0.5, 0.25) == 1u);  // on the face between ix 0 and 1
  CHECK(g.cell_of(1.0, 1.0) == 2u * 8u + 2u);
  CHECK(g.cell_of(4.0, 3.0) == 5u * 8u + 7u);
  CHECK(g.cell_of(0.0, 0.0) == 0u);
  CHECK_THROWS_AS(g.cell_of(4.0001, 1.0), std::logic_error);
  CHECK_THROWS_AS(g.cell_of(1.0, -1e-9), std::logic_error);
}

TEST_CASE("binning is a stable partition with multinomial counts") {
  const std::size_t N = 1000000;
  Grid2D g(20, 10, 2.0, 1.0);
  ParticleArrays p = uniform_gas(N, 2.0, 1.0, {0, 0, 0}, 1.0, 31);
  bin_particles(p, g);
  REQUIRE(g.cell_start.back() == N);
  const double mean = double(N) / g.num_cells();
  const double sd = std::sqrt(mean * (1.0 - 1.0 / g.num_cells()));
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const auto [lo, hi] = g.range(c);
    CHECK(std::abs(double(hi - lo) - mean) < 5.0 * sd);
    for (std::size_t k = lo; k < hi; ++k) {
      REQUIRE(g.cell_of(p.x[k], p.y[k]) == c);
      if (k > lo) REQUIRE(p.id[k] > p.id[k - 1]);  // stable
    }
  }
}

TEST_CASE("specular wall mirrors and preserves speed exactly") {
  BoundarySpec s = box(1.0, 1.0, EdgeKind::kSpecular);
  ParticleArrays p;
  const Vec3 v{0.3, -0.8, 0.1};
  p.push_back(0.5, 0.1, v, 0);
  stream(p, 0.25);  // y -> -0.1
  const auto st = apply_boundaries(p, s, 0.25, 1, 1);
  CHECK(st.specular == 1);
  CHECK(p.vy[0] == 0.8);
  CHECK(p.vx[0] == v[0]);
  CHECK(p.y[0] == doctest::Approx(0.1));
  CHECK(p.x[0] == doctest::Approx(0.5 + 0.3 * 0.25));
  const double sp0 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  CHECK(p.vx[0] * p.vx[0] + p.vy[0] * p.vy[0] + p.vz[0] * p.vz[0] == sp0);
}

TEST_CASE("outflow deletes the leaver and the bookkeeping adds up") {
  BoundarySpec s = box(1.0, 1.0, EdgeKind::kSpecular);
  s.edges[static_cast<std::size_t>(Edge::kRight)] = EdgeKind::kOutflow;
  ParticleArrays p;
  p.push_back(0.95, 0.5, {1.0, 0.0, 0.0}, 0);
  p.push_back(0.5, 0.5, {0.1, 0.0, 0.0}, 1);
  stream(p, 0.1);
  const auto st = apply_boundaries(p, s, 0.1, 1, 1);
  CHECK(st.deleted == 1);
  REQUIRE(p.size() == 1);
  CHECK(p.id[0] == 1);
}

TEST_CASE("plate: crossing particles are re-emitted to their own side") {
  BoundarySpec s = box(2.0, 2.0, EdgeKind::kSpecular);
  s.plate = {true, 1.0, 0.0, 1.0, 1.0};
  Grid2D g(4, 4, 2.0, 2.0);
  CHECK_NOTHROW(s.validate(g));
  ParticleArrays p;
  for (std::uint64_t k = 0; k < 200; ++k) {
    p.push_back(0.9, 0.5, {2.0, 0.1, 0.0}, k);      // hits the plate from the left
    p.push_back(1.1, 1.5, {-2.0, 0.0, 0.0}, 1000 + k);  // passes above it
  }
  stream(p, 0.1);
  const auto st = apply_boundaries(p, s, 0.1, 3, 1);
  CHECK(st.diffuse == 200);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.id[k] < 1000) {
      CHECK(p.x[k] <= 1.0);
      CHECK(p.vx[k] < 0.0);
    } else {
      CHECK(p.x[k] == doctest::Approx(0.9));
    }
  }
  BoundarySpec bad = s;
  bad.plate.x = 1.1;
  CHECK_THROWS_AS(bad.validate(g), std::invalid_argument);
}

TEST_CASE("gas sealed by diffuse walls equilibrates to the wall temperature") {
  const double theta_w = 2.0;
  BoundarySpec s = box(1.0, 1.0, EdgeKind::kDiffuseWall);
  s.wall_theta = theta_w;
  ParticleArrays p = uniform_gas(100000, 1.0, 1.0, {0.5, 0, 0}, 1.0, 8);
  for (int step = 1; step <= 400; ++step) {
    stream(p, 0.05);
    apply_boundaries(p, s, 0.05, 8, static_cast<std::uint64_t>(step));
  }
  REQUIRE(p.size() == 100000);
  const Bulk b = bulk(p, 1.0, 1.0);
  CHECK(b.theta == doctest::Approx(theta_w).epsilon(0.01));
}

TEST_CASE("inflow flux limits") {
  CHECK(inflow_flux(2.0, 1.5, 0.0) == doctest::Approx(2.0 * std::sqrt(1.5 / (2.0 * std::numbers::pi))));
  CHECK(inflow_flux(1.0, 1.0, 30.0) == doctest::Approx(30.0).epsilon(1e-10));
    // far upstream: n sqrt(theta/2pi) e^{-s^2} / (2 s^2) (1 - 3/(2 s^2) + O(s^-4))
  const double s = 30.0 / std::sqrt(2.0);
  const double tail = std::exp(-s * s) / (2.0 * s * s) * (1.0 - 1.5 / (s * s)) / std::sqrt(2.0 * std::numbers::pi);
  CHECK(inflow_flux(1.0, 1.0, -30.0) == doctest::Approx(tail).epsilon(1e-4));
}

TEST_CASE("flux-weighted normal speed matches the 1D quadrature mean") {
  using boost::math::quadrature::gauss_kronrod;
  for (double s : {-0.5, 0.0, 1.0, 3.1}) {
    auto w = [s](double z) { return z * std::exp(-(z - s) * (z - s)); };
    const double hi = std::max(s, 0.0) + 12.0;
    const double norm = gauss_kronrod<double, 61>::integrate(w, 0.0, hi);
    const double mean = gauss_kronrod<double, 61>::integrate([&](double z) { return z * w(z); }, 0.0, hi) / norm;
    CounterRng rng(5, 0, 0, StreamTag::kTest);
    double acc = 0;
    const int N = 1000000;
    for (int k = 0; k < N; ++k) acc += sample_flux_normal(s, rng);
    CHECK(acc / N == doctest::Approx(mean).epsilon(0.02));
  }
}

TEST_CASE("injection count and placement") {
  BoundarySpec s = box(2.0, 3.0, EdgeKind::kOutflow);
  s.edges[static_cast<std::size_t>(Edge::kLeft)] = EdgeKind::kOpen;
  s.inflow = {1.0, {2.0, 0.0, 0.0}, 1.0};
  const double dt = 0.01, w = 1e-4;
  const double expected = inflow_flux(1.0, 1.0, 2.0) * 3.0 * dt / w;
  std::uint64_t next = 0;
  double total = 0;
  for (int step = 0; step < 100; ++step) {
    ParticleArrays p;
    total += double(inject_all_inflow(p, s, w, dt, 1, static_cast<std::uint64_t>(step), next));
    for (std::size_t k = 0; k < p.size(); ++k) {
      REQUIRE(p.vx[k] > 0.0);
      REQUIRE(p.x[k] <= p.vx[k] * dt + 1e-15);
      REQUIRE(p.y[k] >= 0.0);
      REQUIRE(p.y[k] <= 3.0);
    }
  }
  // ids are handed out before the partial flight, so next counts every draw
  CHECK(double(next) / 100 == doctest::Approx(expected).epsilon(0.01));
  CHECK(total <= double(next));
  CHECK(total >= 0.99 * double(next));
}

TEST_CASE("open box preserves the free stream; mass bookkeeping is exact") {
  const double L = 4.0, dt = 0.05;
  BoundarySpec s = box(L, L, EdgeKind::kOpen);
  s.inflow = {1.0, {1.2, -0.4, 0.0}, 1.0};
  const std::size_t N0 = 100000;
  const double w = L * L / N0;
  ParticleArrays p = uniform_gas(N0, L, L, s.inflow.U, 1.0, 12);
  std::uint64_t next = N0;
  Bulk avg;
  int samples = 0;
  for (int step = 1; step <= 1000; ++step) {
    const std::size_t before = p.size();
    stream(p, dt);
    const auto st = apply_boundaries(p, s, dt, 12, static_cast<std::uint64_t>(step));
    const std::size_t added = inject_all_inflow(p, s, w, dt, 12, static_cast<std::uint64_t>(step), next);
    REQUIRE(p.size() == before - st.deleted + added);
    if (step > 200) {
      const Bulk b = bulk(p, w, L * L);
      avg.n += b.n;
      for (int i = 0; i < 3; ++i) avg.U[i] += b.U[i];
      avg.theta += b.theta;
      ++samples;
    }
  }
  CHECK(avg.n / samples == doctest::Approx(1.0).epsilon(0.01));
  CHECK(avg.U[0] / samples == doctest::Approx(1.2).epsilon(0.01));
  CHECK(avg.U[1] / samples == doctest::Approx(-0.4).epsilon(0.01));
  CHECK(avg.theta / samples == doctest::Approx(1.0).epsilon(0.01));
}
