#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fefp {

using Vec3 = std::array<double, 3>;

enum class Interaction { kMaxwell, kHardSphereApprox };

/// Monatomic gas model with a power-law viscosity mu = mu0 (T/T0)^omega.
///
/// The default state is the nondimensional reference gas used throughout the
/// solver: rho0 = theta_ref = tau_ref = 1, hence mu0 = 1/2 and m = kB = T0 = 1.
struct GasModel {
  double molecular_mass = 1.0;
  double mu0 = 0.5;
  double T0 = 1.0;
  double omega = 1.0;
  double kB = 1.0;
  Interaction interaction = Interaction::kMaxwell;

  static GasModel maxwell();
  static GasModel hard_sphere();

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;

  double viscosity(double theta) const;
};

struct TransportScales {
  double mu = 0.0;
  double p = 0.0;
  double tau = 0.0;
};

/// p = rho theta, mu from the viscosity law, tau = 2 mu / p.
/// Throws DegenerateCellError for non-positive theta or rho.
TransportScales transport_scales(double theta, double rho, const GasModel& model);

/// Hard-sphere / VHS mean free path for the model at (rho, theta).
double mean_free_path(double rho, double theta, const GasModel& model);

/// Structure-of-arrays particle storage. Positions are 2D (x, y); velocities 3D.
/// `id` is a persistent label used to key the per-particle random streams.
struct ParticleArrays {
  std::vector<double> x, y;
  std::vector<double> vx, vy, vz;
  std::vector<std::uint64_t> id;

  std::size_t size() const noexcept { return vx.size(); }
  void reserve(std::size_t n);
  void resize(std::size_t n);
  void push_back(double px, double py, const Vec3& v, std::uint64_t pid);
  /// Keeps only entries with keep[i] != 0, preserving order.
  void compact(std::span<const std::uint8_t> keep);
  /// out[k] = this[perm[k]] for every array.
  void permute(std::span<const std::uint32_t> perm);
};

/// Fills the velocity arrays with i.i.d. draws from N(U, theta I).
/// Stream is keyed by (seed, particle index) so output is independent of
/// threading. Throws std::invalid_argument if theta <= 0 or the spans are empty.
void sample_maxwellian(const Vec3& U, double theta, std::uint64_t seed, std::span<double> vx,
                       std::span<double> vy, std::span<double> vz);

}  // namespace fefp
