#include <array>
#include <cmath>

#include "fefp/polynomial.hpp"
#include "fefp/simd/kernels.hpp"

namespace fefp::simd {

namespace {

void sum3(const double* vx, const double* vy, const double* vz, std::size_t n, double* out) {
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    sx += vx[p];
    sy += vy[p];
    sz += vz[p];
  }
  out[0] = sx;
  out[1] = sy;
  out[2] = sz;
}

double fluct_energy(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U) {
  double e = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double a = vx[p] - U[0], b = vy[p] - U[1], c = vz[p] - U[2];
    e += a * a + b * b + c * c;
  }
  return e;
}

template <int K>
void accumulate_k(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U, double* out) {
  std::array<double, K + 1> px{}, py{}, pz{};
  for (std::size_t p = 0; p < n; ++p) {
    const double a = vx[p] - U[0], b = vy[p] - U[1], c = vz[p] - U[2];
    px[0] = py[0] = pz[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
      px[k] = px[k - 1] * a;
      py[k] = py[k - 1] * b;
      pz[k] = pz[k - 1] * c;
    }
    // walk the full-order layout, skipping entries above K
    int idx = 0;
    for (int i = 0; i <= kMaxOrder; ++i)
      for (int j = 0; i + j <= kMaxOrder; ++j) {
        const int lmax = kMaxOrder - i - j;
        if (i + j <= K) {
          const double t = px[i] * py[j];
          for (int l = 0; i + j + l <= K; ++l) out[idx + l] += t * pz[l];
        }
        idx += lmax + 1;
      }
  }
}

void accumulate_moments(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U,
                        double* out, int max_order) {
  switch (max_order) {
    case 0: case 1: case 2: return accumulate_k<2>(vx, vy, vz, n, U, out);
    case 3: return accumulate_k<3>(vx, vy, vz, n, U, out);
    case 4: return accumulate_k<4>(vx, vy, vz, n, U, out);
    case 5: return accumulate_k<5>(vx, vy, vz, n, U, out);
    case 6: return accumulate_k<6>(vx, vy, vz, n, U, out);
    case 7: return accumulate_k<7>(vx, vy, vz, n, U, out);
    default: return accumulate_k<kMaxOrder>(vx, vy, vz, n, U, out);
  }
}

void velocity_half_step(double* vx, double* vy, double* vz, const double* xi_x, const double* xi_y,
                        const double* xi_z, std::size_t n, const double* U, const DriftPolynomial& drift,
                        double decay, double dt, double noise_std, double inv_tame, double* sums) {
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const Vec3 v{vx[p] - U[0], vy[p] - U[1], vz[p] - U[2]};
    const Vec3 a = drift.eval_nonlinear(v);
    const double h = dt / (1.0 + dt * inv_tame * std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]));
    vx[p] = decay * v[0] + a[0] * h + noise_std * xi_x[p];
    vy[p] = decay * v[1] + a[1] * h + noise_std * xi_y[p];
    vz[p] = decay * v[2] + a[2] * h + noise_std * xi_z[p];
    sx += vx[p];
    sy += vy[p];
    sz += vz[p];
  }
  sums[0] = sx;
  sums[1] = sy;
  sums[2] = sz;
}

void rescale(double* vx, double* vy, double* vz, std::size_t n, const double* mean, double scale, const double* U) {
  for (std::size_t p = 0; p < n; ++p) {
    vx[p] = scale * (vx[p] - mean[0]) + U[0];
    vy[p] = scale * (vy[p] - mean[1]) + U[1];
    vz[p] = scale * (vz[p] - mean[2]) + U[2];
  }
}

void stream(double* x, double* y, const double* vx, const double* vy, std::size_t n, double dt) {
  for (std::size_t p = 0; p < n; ++p) {
    x[p] += vx[p] * dt;
    y[p] += vy[p] * dt;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", sum3, fluct_energy, accumulate_moments, velocity_half_step, rescale,
                                 stream};
  return table;
}

}  // namespace fefp::simd
