#pragma once

#include <cstddef>
#include <string_view>

#include "fefp/drift.hpp"

namespace fefp::simd {

/// Particle-loop kernels. Every variant computes the same quantities; they may
/// differ only in floating-point summation order and FMA contraction.
struct KernelTable {
  std::string_view name;

  /// out[0..2] = sum of each velocity component.
  void (*sum3)(const double* vx, const double* vy, const double* vz, std::size_t n, double* out);

  /// sum |v - U|^2
  double (*fluct_energy)(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U);

  /// out[k] += sum_p (v_p - U)^alpha_k for the multi-indices of order <= max_order
  /// (at least 2), laid out in full MomentIndex order; other entries untouched.
  void (*accumulate_moments)(const double* vx, const double* vy, const double* vz, std::size_t n,
                             const double* U, double* out, int max_order);

  /// In place: v <- decay (v - U) + N(v - U) h + noise_std xi, where N is the
  /// drift without its -v'/tau part and h = dt / (1 + dt |N| inv_tame), so the
  /// explicit increment stays below 1/inv_tame. inv_tame = 0 is plain Euler.
  /// Results stay in the fluctuating frame. sums[0..2] receive the component
  /// sums of the new values.
  void (*velocity_half_step)(double* vx, double* vy, double* vz, const double* xi_x, const double* xi_y,
                             const double* xi_z, std::size_t n, const double* U, const DriftPolynomial& drift,
                             double decay, double dt, double noise_std, double inv_tame, double* sums);

  /// In place: v <- scale (v - mean) + U
  void (*rescale)(double* vx, double* vy, double* vz, std::size_t n, const double* mean, double scale,
                  const double* U);

  /// x += vx dt, y += vy dt
  void (*stream)(double* x, double* y, const double* vx, const double* vy, std::size_t n, double dt);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA variant, or nullptr if this build has none.
const KernelTable* avx2_kernels();

/// The variant chosen at startup: AVX2 when compiled in and supported by the
/// CPU, scalar otherwise. Setting FEFP_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

bool cpu_supports_avx2();

}  // namespace fefp::simd
