#include "fefp/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fefp {

Grid2D::Grid2D(int nx_, int ny_, double Lx_, double Ly_) : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
  if (nx <= 0 || ny <= 0 || !(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("Grid2D: bad dimensions");
  cell_start.assign(num_cells() + 1, 0);
}

std::size_t Grid2D::cell_of(double x, double y) const {
  if (!(x >= 0.0 && x <= Lx && y >= 0.0 && y <= Ly))
    throw std::logic_error("particle outside the domain at binning: (" + std::to_string(x) + ", " +
                           std::to_string(y) + ")");
  const int ix = std::min(static_cast<int>(std::floor(x / dx())), nx - 1);
  const int iy = std::min(static_cast<int>(std::floor(y / dy())), ny - 1);
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
}

void bin_particles(ParticleArrays& particles, Grid2D& grid) {
  const std::size_t n = particles.size();
  const std::size_t nc = grid.num_cells();
  static thread_local std::vector<std::uint32_t> cell, perm;
  cell.resize(n);
  perm.resize(n);
  grid.cell_start.assign(nc + 1, 0);
  for (std::size_t p = 0; p < n; ++p) {
    cell[p] = static_cast<std::uint32_t>(grid.cell_of(particles.x[p], particles.y[p]));
    ++grid.cell_start[cell[p] + 1];
  }
  for (std::size_t c = 0; c < nc; ++c) grid.cell_start[c + 1] += grid.cell_start[c];
  std::vector<std::uint32_t> cursor(grid.cell_start.begin(), grid.cell_start.end() - 1);
  for (std::size_t p = 0; p < n; ++p) perm[cursor[cell[p]]++] = static_cast<std::uint32_t>(p);
  particles.permute(perm);
}

void BoundarySpec::validate(const Grid2D& grid) const {
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("boundary: domain extents must be positive");
  if (std::abs(Lx - grid.Lx) > 1e-12 * Lx || std::abs(Ly - grid.Ly) > 1e-12 * Ly)
    throw std::invalid_argument("boundary: extents differ from the grid");
  const bool open = std::find(edges.begin(), edges.end(), EdgeKind::kOpen) != edges.end();
  if (open && (!(inflow.n > 0.0) || !(inflow.theta > 0.0)))
    throw std::invalid_argument("boundary: inflow density and temperature must be positive");
  const bool walls = std::find(edges.begin(), edges.end(), EdgeKind::kDiffuseWall) != edges.end();
  if (walls && !(wall_theta > 0.0)) throw std::invalid_argument("boundary: wall temperature must be positive");
  if (plate.enabled) {
    if (!(plate.theta_w > 0.0)) throw std::invalid_argument("boundary: plate temperature must be positive");
    const double f = plate.x / grid.dx();
    if (std::abs(f - std::round(f)) > 1e-9 || plate.x <= 0.0 || plate.x >= Lx)
      throw std::invalid_argument("boundary: plate must lie on an interior vertical cell face");
    if (!(plate.y1 > plate.y0) || plate.y0 < 0.0 || plate.y1 > Ly)
      throw std::invalid_argument("boundary: bad plate extent");
  }
}

Vec3 sample_wall_velocity(double theta_w, int axis, double sign, CounterRng& rng) {
  const double sd = std::sqrt(theta_w);
  Vec3 v{sd * rng.normal(), sd * rng.normal(), sd * rng.normal()};
  v[static_cast<std::size_t>(axis)] = sign * sd * std::sqrt(-2.0 * std::log(rng.uniform()));
  return v;
}

namespace {

constexpr int kMaxEvents = 32;

enum class Hit { kNone, kLeft, kRight, kBottom, kTop, kPlate };

// Straight flight for t_rem with wall events; returns false if the particle left.
bool trace(double& x, double& y, Vec3& v, double t_rem, const BoundarySpec& spec, CounterRng& rng,
           BoundaryStats& stats) {
  for (int ev = 0; ev < kMaxEvents; ++ev) {
    double t_hit = t_rem;
    Hit what = Hit::kNone;
    auto consider = [&](double t, Hit h) {
      t = std::max(t, 0.0);
      if (t <= t_hit) {
        t_hit = t;
        what = h;
      }
    };
    if (v[0] < 0.0) consider(-x / v[0], Hit::kLeft);
    if (v[0] > 0.0) consider((spec.Lx - x) / v[0], Hit::kRight);
    if (v[1] < 0.0) consider(-y / v[1], Hit::kBottom);
    if (v[1] > 0.0) consider((spec.Ly - y) / v[1], Hit::kTop);
    const double side = x - spec.plate.x;
    if (spec.plate.enabled && side * v[0] < 0.0) {
      const double t = -side / v[0];
      const double yh = y + v[1] * t;
      if (t <= t_hit && yh >= spec.plate.y0 && yh <= spec.plate.y1) {
        t_hit = t;
        what = Hit::kPlate;
      }
    }
    if (what == Hit::kNone) {
      x += v[0] * t_rem;
      y += v[1] * t_rem;
      return true;
    }
    x += v[0] * t_hit;
    y += v[1] * t_hit;
    t_rem -= t_hit;
    if (what == Hit::kPlate) {
      x = spec.plate.x;
      v = sample_wall_velocity(spec.plate.theta_w, 0, side < 0.0 ? -1.0 : 1.0, rng);
      ++stats.diffuse;
      continue;
    }
    Edge e{};
    int axis = 0;
    double inward = 1.0;
    switch (what) {
      case Hit::kLeft: e = Edge::kLeft, x = 0.0, axis = 0, inward = 1.0; break;
      case Hit::kRight: e = Edge::kRight, x = spec.Lx, axis = 0, inward = -1.0; break;
      case Hit::kBottom: e = Edge::kBottom, y = 0.0, axis = 1, inward = 1.0; break;
      default: e = Edge::kTop, y = spec.Ly, axis = 1, inward = -1.0; break;
    }
    switch (spec.kind(e)) {
      case EdgeKind::kOpen:
      case EdgeKind::kOutflow: return false;
      case EdgeKind::kSpecular:
        v[static_cast<std::size_t>(axis)] = -v[static_cast<std::size_t>(axis)];
        ++stats.specular;
        break;
      case EdgeKind::kDiffuseWall:
        v = sample_wall_velocity(spec.wall_theta, axis, inward, rng);
        ++stats.diffuse;
        break;
    }
  }
  x = std::clamp(x, 0.0, spec.Lx);
  y = std::clamp(y, 0.0, spec.Ly);
  return true;
}

bool needs_trace(double x, double y, double vx, double dt, const BoundarySpec& spec) {
  if (!(x >= 0.0 && x <= spec.Lx && y >= 0.0 && y <= spec.Ly)) return true;
  if (!spec.plate.enabled) return false;
  const double x0 = x - vx * dt;
  return (x0 - spec.plate.x) * (x - spec.plate.x) <= 0.0;
}

}  // namespace

BoundaryStats apply_boundaries(ParticleArrays& particles, const BoundarySpec& spec, double dt, std::uint64_t seed,
                               std::uint64_t step) {
  BoundaryStats stats;
  const std::size_t n = particles.size();
  static thread_local std::vector<std::uint8_t> keep;
  keep.assign(n, 1);
  for (std::size_t p = 0; p < n; ++p) {
    if (!needs_trace(particles.x[p], particles.y[p], particles.vx[p], dt, spec)) continue;
    Vec3 v{particles.vx[p], particles.vy[p], particles.vz[p]};
    double x = particles.x[p] - v[0] * dt;
    double y = particles.y[p] - v[1] * dt;
    CounterRng rng(seed, step, particles.id[p], StreamTag::kBoundary);
    if (!trace(x, y, v, dt, spec, rng, stats)) {
      keep[p] = 0;
      ++stats.deleted;
      continue;
    }
    particles.x[p] = x;
    particles.y[p] = y;
    particles.vx[p] = v[0];
    particles.vy[p] = v[1];
    particles.vz[p] = v[2];
  }
  if (stats.deleted > 0) particles.compact(keep);
  return stats;
}

double inflow_flux(double n, double theta, double U_normal) {
  const double s = U_normal / std::sqrt(2.0 * theta);
  return n * std::sqrt(theta / (2.0 * std::numbers::pi)) *
         (std::exp(-s * s) + std::sqrt(std::numbers::pi) * s * std::erfc(-s));
}

double sample_flux_normal(double s, CounterRng& rng) {
  const double lo = std::max(0.0, s - 5.0);
  const double hi = std::max(s, 0.0) + 5.0;
  const double zmax = 0.5 * (s + std::sqrt(s * s + 2.0));
  auto g = [s](double z) { return z * std::exp(-(z - s) * (z - s)); };
  const double gmax = g(zmax);
  for (;;) {
    const double z = lo + (hi - lo) * rng.uniform();
    if (rng.uniform() * gmax <= g(z)) return z;
  }
}

std::size_t inject_inflow(ParticleArrays& particles, const BoundarySpec& spec, Edge edge, double weight, double dt,
                          std::uint64_t seed, std::uint64_t step, std::uint64_t& next_id) {
  const FreeStream& fs = spec.inflow;
  const int axis = (edge == Edge::kLeft || edge == Edge::kRight) ? 0 : 1;
  const double inward = (edge == Edge::kLeft || edge == Edge::kBottom) ? 1.0 : -1.0;
  const double length = axis == 0 ? spec.Ly : spec.Lx;
  const double Un = inward * fs.U[static_cast<std::size_t>(axis)];
  const double expected = inflow_flux(fs.n, fs.theta, Un) * length * dt / weight;

  CounterRng rng(seed, step, static_cast<std::uint64_t>(edge), StreamTag::kInflow);
  const double whole = std::floor(expected);
  const auto count = static_cast<std::size_t>(whole) + (rng.uniform() < expected - whole ? 1 : 0);

  const double c = std::sqrt(2.0 * fs.theta);
  const double s = Un / c;
  const double sd = std::sqrt(fs.theta);
  BoundaryStats scratch;
  std::size_t added = 0;
  for (std::size_t k = 0; k < count; ++k) {
    Vec3 v{fs.U[0] + sd * rng.normal(), fs.U[1] + sd * rng.normal(), fs.U[2] + sd * rng.normal()};
    v[static_cast<std::size_t>(axis)] = inward * c * sample_flux_normal(s, rng);
    double x = 0.0, y = 0.0;
    const double along = rng.uniform();
    switch (edge) {
      case Edge::kLeft: x = 0.0, y = along * spec.Ly; break;
      case Edge::kRight: x = spec.Lx, y = along * spec.Ly; break;
      case Edge::kBottom: x = along * spec.Lx, y = 0.0; break;
      case Edge::kTop: x = along * spec.Lx, y = spec.Ly; break;
    }
    const std::uint64_t id = next_id++;
    CounterRng wall_rng(seed, step, id, StreamTag::kBoundary);
    if (!trace(x, y, v, rng.uniform() * dt, spec, wall_rng, scratch)) continue;
    particles.push_back(x, y, v, id);
    ++added;
  }
  return added;
}

std::size_t inject_all_inflow(ParticleArrays& particles, const BoundarySpec& spec, double weight, double dt,
                              std::uint64_t seed, std::uint64_t step, std::uint64_t& next_id) {
  std::size_t added = 0;
  for (int e = 0; e < 4; ++e)
    if (spec.edges[static_cast<std::size_t>(e)] == EdgeKind::kOpen)
      added += inject_inflow(particles, spec, static_cast<Edge>(e), weight, dt, seed, step, next_id);
  return added;
}

}  // namespace fefp
