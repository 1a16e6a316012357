#pragma once

#include <cstdint>
#include <span>

#include "fefp/drift.hpp"
#include "fefp/kinetics.hpp"
#include "fefp/simd/kernels.hpp"

namespace fefp {

/// Exact Ornstein-Uhlenbeck factors for one step of length dt.
struct StepParams {
  double dt = 0.0;
  double s = 0.0;
  double decay = 1.0;      // e^{-s}
  double noise_std = 0.0;  // sqrt(theta (1 - e^{-2s}))

  /// Throws std::invalid_argument unless dt > 0, tau > 0, theta >= 0.
  static StepParams make(double dt, double tau, double theta);
};

/// Cell totals before and after a velocity update.
struct CellAudit {
  Vec3 momentum_before{};
  Vec3 momentum_after{};
  double energy_before = 0.0;
  double energy_after = 0.0;
};

/// Views of one cell's particles (contiguous after binning).
struct CellVelocities {
  std::span<double> vx, vy, vz;
  std::span<const std::uint64_t> id;

  std::size_t size() const noexcept { return vx.size(); }
};

struct VelocityUpdate {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  /// Center, rescale to the pre-step fluctuation energy and restore the pre-step
  /// mean. Off only for tests of the raw scheme.
  bool project = true;
  /// Tame the explicit drift increment at the thermal speed sqrt(theta).
  /// Plain Euler for the nonlinear part diverges on tail particles once the
  /// quintic stabilizer is active; off only for tests of the raw scheme.
  bool tame = true;
};

/// Split-step velocity update of one cell:
///   v <- e^{-s} v' + N(v') h + sqrt(theta (1 - e^{-2s})) xi,
///   h = dt / (1 + dt |N(v')| / sqrt(theta))
/// with N the drift minus its -v'/tau part, followed by the conservation
/// projection. Cells with fewer than two particles, or theta <= 0, are left
/// untouched. Noise for particle p comes from its own (seed, step, id) stream.
void advance_cell_velocities(CellVelocities cell, const DriftPolynomial& drift, double theta, double tau, double dt,
                             const VelocityUpdate& update, CellAudit* audit = nullptr,
                             const simd::KernelTable& kernels = simd::active_kernels());

/// Free flight of all particles: x += vx dt, y += vy dt.
void stream(ParticleArrays& particles, double dt, const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace fefp
