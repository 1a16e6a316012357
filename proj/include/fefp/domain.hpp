#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fefp/kinetics.hpp"
#include "fefp/rng.hpp"

namespace fefp {

/// Uniform nx x ny grid on [0, Lx] x [0, Ly]; cell c = iy * nx + ix.
/// After bin_particles the particles of cell c occupy [cell_start[c], cell_start[c+1]).
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double Lx = 0.0;
  double Ly = 0.0;
  std::vector<std::uint32_t> cell_start;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double Lx_, double Ly_);

  double dx() const noexcept { return Lx / nx; }
  double dy() const noexcept { return Ly / ny; }
  double cell_area() const noexcept { return dx() * dy(); }
  std::size_t num_cells() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  /// Floor rule: a point on an interior face belongs to the higher-index cell;
  /// points on the far domain faces belong to the last cell.
  /// Throws std::logic_error for points outside the domain.
  std::size_t cell_of(double x, double y) const;
  std::pair<std::size_t, std::size_t> range(std::size_t c) const {
    return {cell_start[c], cell_start[c + 1]};
  }
  double cell_center_x(int ix) const { return (ix + 0.5) * dx(); }
  double cell_center_y(int iy) const { return (iy + 0.5) * dy(); }
};

/// Stable counting sort of the particles by cell; physically permutes the
/// particle arrays so each cell is contiguous and fills grid.cell_start.
void bin_particles(ParticleArrays& particles, Grid2D& grid);

enum class Edge { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

enum class EdgeKind {
  /// free-stream boundary: leavers are deleted, free-stream flux is injected
  kOpen,
  kOutflow,
  kSpecular,
  /// diffuse wall at rest with temperature wall_theta
  kDiffuseWall,
};

struct FreeStream {
  double n = 1.0;
  Vec3 U{0.0, 0.0, 0.0};
  double theta = 1.0;
};

/// Infinitely thin diffuse plate on the line x = x, from y0 to y1.
struct Plate {
  bool enabled = false;
  double x = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  double theta_w = 1.0;
};

struct BoundarySpec {
  double Lx = 1.0;
  double Ly = 1.0;
  std::array<EdgeKind, 4> edges{EdgeKind::kSpecular, EdgeKind::kSpecular, EdgeKind::kSpecular, EdgeKind::kSpecular};
  FreeStream inflow;
  double wall_theta = 1.0;
  Plate plate;

  EdgeKind kind(Edge e) const { return edges[static_cast<std::size_t>(e)]; }
  /// Throws std::invalid_argument for non-physical parameters or a plate that
  /// is not aligned with a face of `grid`.
  void validate(const Grid2D& grid) const;
};

struct BoundaryStats {
  std::size_t deleted = 0;
  std::size_t injected = 0;
  std::size_t specular = 0;
  std::size_t diffuse = 0;
};

/// Re-traces every particle whose straight flight over the last dt left the
/// box or crossed the plate, handling events in flight-time order, and deletes
/// those that exit through open or outflow edges. The flight start is
/// reconstructed as x - v dt, so this runs right after stream(dt).
BoundaryStats apply_boundaries(ParticleArrays& particles, const BoundarySpec& spec, double dt, std::uint64_t seed,
                               std::uint64_t step);

/// Number flux of a drifting Maxwellian through a plane, per unit area:
/// n sqrt(theta / 2 pi) [exp(-s^2) + sqrt(pi) s (1 + erf s)], s = U_n / sqrt(2 theta).
double inflow_flux(double n, double theta, double U_normal);

/// Draws z > 0 from the density proportional to z exp(-(z - s)^2); the
/// injected normal speed is sqrt(2 theta) z.
double sample_flux_normal(double s, CounterRng& rng);

/// Rayleigh normal speed and Gaussian tangentials for re-emission from a
/// diffuse wall at rest; `normal` is the unit axis pointing into the gas
/// (index 0 or 1, sign +-1).
Vec3 sample_wall_velocity(double theta_w, int axis, double sign, CounterRng& rng);

/// Injects free-stream particles through `edge` for one step of length dt.
/// Expected count Phi * edge_length * dt / weight is stochastically rounded;
/// each particle starts on the edge and flies a uniform fraction of dt.
/// Returns the number of particles added.
std::size_t inject_inflow(ParticleArrays& particles, const BoundarySpec& spec, Edge edge, double weight, double dt,
                          std::uint64_t seed, std::uint64_t step, std::uint64_t& next_id);

/// Injects through every kOpen edge.
std::size_t inject_all_inflow(ParticleArrays& particles, const BoundarySpec& spec, double weight, double dt,
                              std::uint64_t seed, std::uint64_t step, std::uint64_t& next_id);

}  // namespace fefp
