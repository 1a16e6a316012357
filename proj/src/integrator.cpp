#include "fefp/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fefp/rng.hpp"

namespace fefp {

StepParams StepParams::make(double dt, double tau, double theta) {
  if (!(dt > 0.0) || !(tau > 0.0) || !(theta >= 0.0)) throw std::invalid_argument("StepParams: bad dt, tau or theta");
  StepParams p;
  p.dt = dt;
  p.s = dt / tau;
  p.decay = std::exp(-p.s);
  // -expm1(-2s) keeps the small-s limit accurate
  p.noise_std = std::sqrt(theta * -std::expm1(-2.0 * p.s));
  return p;
}

void advance_cell_velocities(CellVelocities cell, const DriftPolynomial& drift, double theta, double tau, double dt,
                             const VelocityUpdate& update, CellAudit* audit, const simd::KernelTable& kernels) {
  const std::size_t n = cell.size();
  double* vx = cell.vx.data();
  double* vy = cell.vy.data();
  double* vz = cell.vz.data();

  double sums[3];
  kernels.sum3(vx, vy, vz, n, sums);
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  const double U[3] = {sums[0] * inv_n, sums[1] * inv_n, sums[2] * inv_n};
  const double energy = kernels.fluct_energy(vx, vy, vz, n, U);
  if (audit != nullptr) {
    for (std::size_t i = 0; i < 3; ++i) audit->momentum_before[i] = sums[i];
    audit->energy_before = energy;
  }

  if (n >= 2 && theta > 0.0 && tau > 0.0) {
    const StepParams sp = StepParams::make(dt, tau, theta);
    static thread_local std::vector<double> xi_x, xi_y, xi_z;
    xi_x.resize(n);
    xi_y.resize(n);
    xi_z.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const auto xi = particle_normals(update.seed, update.step, cell.id[p]);
      xi_x[p] = xi[0];
      xi_y[p] = xi[1];
      xi_z[p] = xi[2];
    }
    double post[3];
    const double inv_tame = update.tame ? 1.0 / std::sqrt(theta) : 0.0;
    kernels.velocity_half_step(vx, vy, vz, xi_x.data(), xi_y.data(), xi_z.data(), n, U, drift, sp.decay, sp.dt,
                               sp.noise_std, inv_tame, post);
    if (update.project) {
      const double mean[3] = {post[0] * inv_n, post[1] * inv_n, post[2] * inv_n};
      const double e_post = kernels.fluct_energy(vx, vy, vz, n, mean);
      const double scale = e_post > 0.0 ? std::sqrt(energy / e_post) : 0.0;
      kernels.rescale(vx, vy, vz, n, mean, scale, U);
    } else {
      const double zero[3] = {0.0, 0.0, 0.0};
      kernels.rescale(vx, vy, vz, n, zero, 1.0, U);
    }
  }

  if (audit != nullptr) {
    double after[3];
    kernels.sum3(vx, vy, vz, n, after);
    for (std::size_t i = 0; i < 3; ++i) audit->momentum_after[i] = after[i];
    audit->energy_after = kernels.fluct_energy(vx, vy, vz, n, U);
  }
}

void stream(ParticleArrays& particles, double dt, const simd::KernelTable& kernels) {
  kernels.stream(particles.x.data(), particles.y.data(), particles.vx.data(), particles.vy.data(), particles.size(),
                 dt);
}

}  // namespace fefp
