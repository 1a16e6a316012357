// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <array>

#include "fefp/polynomial.hpp"
#include "fefp/simd/kernels.hpp"

namespace fefp::simd {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void sum3(const double* vx, const double* vy, const double* vz, std::size_t n, double* out) {
  __m256d ax = _mm256_setzero_pd(), ay = _mm256_setzero_pd(), az = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    ax = _mm256_add_pd(ax, _mm256_loadu_pd(vx + p));
    ay = _mm256_add_pd(ay, _mm256_loadu_pd(vy + p));
    az = _mm256_add_pd(az, _mm256_loadu_pd(vz + p));
  }
  double sx = hsum(ax), sy = hsum(ay), sz = hsum(az);
  for (; p < n; ++p) {
    sx += vx[p];
    sy += vy[p];
    sz += vz[p];
  }
  out[0] = sx;
  out[1] = sy;
  out[2] = sz;
}

double fluct_energy(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U) {
  const __m256d ux = _mm256_set1_pd(U[0]), uy = _mm256_set1_pd(U[1]), uz = _mm256_set1_pd(U[2]);
  __m256d acc = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(vx + p), ux);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(vy + p), uy);
    const __m256d c = _mm256_sub_pd(_mm256_loadu_pd(vz + p), uz);
    acc = _mm256_fmadd_pd(a, a, acc);
    acc = _mm256_fmadd_pd(b, b, acc);
    acc = _mm256_fmadd_pd(c, c, acc);
  }
  double e = hsum(acc);
  for (; p < n; ++p) {
    const double a = vx[p] - U[0], b = vy[p] - U[1], c = vz[p] - U[2];
    e += a * a + b * b + c * c;
  }
  return e;
}

constexpr int count_upto(int K) { return (K + 1) * (K + 2) * (K + 3) / 6; }

template <int K>
void accumulate_k(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U, double* out,
                  int max_order) {
  constexpr int M = count_upto(K);
  __m256d acc[M];
  for (auto& a : acc) a = _mm256_setzero_pd();
  const __m256d ux = _mm256_set1_pd(U[0]), uy = _mm256_set1_pd(U[1]), uz = _mm256_set1_pd(U[2]);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d px[K + 1], py[K + 1], pz[K + 1];
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(vx + p), ux);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(vy + p), uy);
    const __m256d c = _mm256_sub_pd(_mm256_loadu_pd(vz + p), uz);
    px[0] = py[0] = pz[0] = one;
    for (int k = 1; k <= K; ++k) {
      px[k] = _mm256_mul_pd(px[k - 1], a);
      py[k] = _mm256_mul_pd(py[k - 1], b);
      pz[k] = _mm256_mul_pd(pz[k - 1], c);
    }
    int idx = 0;
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) {
        const __m256d t = _mm256_mul_pd(px[i], py[j]);
        for (int l = 0; i + j + l <= K; ++l, ++idx) acc[idx] = _mm256_fmadd_pd(t, pz[l], acc[idx]);
      }
  }
  // compact order K -> full layout
  int idx = 0, full = 0;
  for (int i = 0; i <= kMaxOrder; ++i)
    for (int j = 0; i + j <= kMaxOrder; ++j) {
      if (i + j <= K)
        for (int l = 0; i + j + l <= K; ++l) out[full + l] += hsum(acc[idx++]);
      full += kMaxOrder - i - j + 1;
    }
  if (p < n) scalar_kernels().accumulate_moments(vx + p, vy + p, vz + p, n - p, U, out, max_order);
}

void accumulate_moments(const double* vx, const double* vy, const double* vz, std::size_t n, const double* U,
                        double* out, int max_order) {
  switch (max_order) {
    case 0: case 1: case 2: return accumulate_k<2>(vx, vy, vz, n, U, out, max_order);
    case 3: return accumulate_k<3>(vx, vy, vz, n, U, out, max_order);
    case 4: return accumulate_k<4>(vx, vy, vz, n, U, out, max_order);
    case 5: return accumulate_k<5>(vx, vy, vz, n, U, out, max_order);
    case 6: return accumulate_k<6>(vx, vy, vz, n, U, out, max_order);
    case 7: return accumulate_k<7>(vx, vy, vz, n, U, out, max_order);
    default: return accumulate_k<kMaxOrder>(vx, vy, vz, n, U, out, max_order);
  }
}

void velocity_half_step(double* vx, double* vy, double* vz, const double* xi_x, const double* xi_y,
                        const double* xi_z, std::size_t n, const double* U, const DriftPolynomial& d,
                        double decay, double dt, double noise_std, double inv_tame, double* sums) {
  const __m256d ux = _mm256_set1_pd(U[0]), uy = _mm256_set1_pd(U[1]), uz = _mm256_set1_pd(U[2]);
  const __m256d vdecay = _mm256_set1_pd(decay), vdt = _mm256_set1_pd(dt), vnoise = _mm256_set1_pd(noise_std);
  const __m256d c0 = _mm256_set1_pd(d.constant[0]), c1 = _mm256_set1_pd(d.constant[1]),
                c2 = _mm256_set1_pd(d.constant[2]);
  __m256d L[9];
  for (std::size_t k = 0; k < 9; ++k) L[k] = _mm256_set1_pd(d.linear[k]);
  const __m256d qn0 = _mm256_set1_pd(d.quad_norm[0]), qn1 = _mm256_set1_pd(d.quad_norm[1]),
                qn2 = _mm256_set1_pd(d.quad_norm[2]);
  const __m256d qp0 = _mm256_set1_pd(d.quad_proj[0]), qp1 = _mm256_set1_pd(d.quad_proj[1]),
                qp2 = _mm256_set1_pd(d.quad_proj[2]);
  const __m256d cub = _mm256_set1_pd(d.cubic), quin = _mm256_set1_pd(d.quintic);
  const __m256d one = _mm256_set1_pd(1.0), vdt_tame = _mm256_set1_pd(dt * inv_tame);
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd(), sz = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(vx + p), ux);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(vy + p), uy);
    const __m256d c = _mm256_sub_pd(_mm256_loadu_pd(vz + p), uz);
    const __m256d r2 = _mm256_fmadd_pd(a, a, _mm256_fmadd_pd(b, b, _mm256_mul_pd(c, c)));
    const __m256d bv = _mm256_fmadd_pd(qp0, a, _mm256_fmadd_pd(qp1, b, _mm256_mul_pd(qp2, c)));
    // radial = bv + cubic r2 - quintic r2^2
    const __m256d radial = _mm256_fmadd_pd(r2, _mm256_fnmadd_pd(quin, r2, cub), bv);
    __m256d ax = _mm256_fmadd_pd(L[0], a, _mm256_fmadd_pd(L[1], b, _mm256_fmadd_pd(L[2], c, c0)));
    __m256d ay = _mm256_fmadd_pd(L[3], a, _mm256_fmadd_pd(L[4], b, _mm256_fmadd_pd(L[5], c, c1)));
    __m256d az = _mm256_fmadd_pd(L[6], a, _mm256_fmadd_pd(L[7], b, _mm256_fmadd_pd(L[8], c, c2)));
    ax = _mm256_fmadd_pd(qn0, r2, _mm256_fmadd_pd(radial, a, ax));
    ay = _mm256_fmadd_pd(qn1, r2, _mm256_fmadd_pd(radial, b, ay));
    az = _mm256_fmadd_pd(qn2, r2, _mm256_fmadd_pd(radial, c, az));
    const __m256d anorm = _mm256_sqrt_pd(_mm256_fmadd_pd(ax, ax, _mm256_fmadd_pd(ay, ay, _mm256_mul_pd(az, az))));
    const __m256d h = _mm256_div_pd(vdt, _mm256_fmadd_pd(vdt_tame, anorm, one));
    const __m256d nx = _mm256_fmadd_pd(vnoise, _mm256_loadu_pd(xi_x + p), _mm256_fmadd_pd(ax, h, _mm256_mul_pd(vdecay, a)));
    const __m256d ny = _mm256_fmadd_pd(vnoise, _mm256_loadu_pd(xi_y + p), _mm256_fmadd_pd(ay, h, _mm256_mul_pd(vdecay, b)));
    const __m256d nz = _mm256_fmadd_pd(vnoise, _mm256_loadu_pd(xi_z + p), _mm256_fmadd_pd(az, h, _mm256_mul_pd(vdecay, c)));
    _mm256_storeu_pd(vx + p, nx);
    _mm256_storeu_pd(vy + p, ny);
    _mm256_storeu_pd(vz + p, nz);
    sx = _mm256_add_pd(sx, nx);
    sy = _mm256_add_pd(sy, ny);
    sz = _mm256_add_pd(sz, nz);
  }
  double tail[3] = {0.0, 0.0, 0.0};
  if (p < n)
    scalar_kernels().velocity_half_step(vx + p, vy + p, vz + p, xi_x + p, xi_y + p, xi_z + p, n - p, U, d, decay, dt,
                                        noise_std, inv_tame, tail);
  sums[0] = hsum(sx) + tail[0];
  sums[1] = hsum(sy) + tail[1];
  sums[2] = hsum(sz) + tail[2];
}

void rescale(double* vx, double* vy, double* vz, std::size_t n, const double* mean, double scale, const double* U) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d mx = _mm256_set1_pd(mean[0]), my = _mm256_set1_pd(mean[1]), mz = _mm256_set1_pd(mean[2]);
  const __m256d ux = _mm256_set1_pd(U[0]), uy = _mm256_set1_pd(U[1]), uz = _mm256_set1_pd(U[2]);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    _mm256_storeu_pd(vx + p, _mm256_fmadd_pd(s, _mm256_sub_pd(_mm256_loadu_pd(vx + p), mx), ux));
    _mm256_storeu_pd(vy + p, _mm256_fmadd_pd(s, _mm256_sub_pd(_mm256_loadu_pd(vy + p), my), uy));
    _mm256_storeu_pd(vz + p, _mm256_fmadd_pd(s, _mm256_sub_pd(_mm256_loadu_pd(vz + p), mz), uz));
  }
  if (p < n) scalar_kernels().rescale(vx + p, vy + p, vz + p, n - p, mean, scale, U);
}

void stream(double* x, double* y, const double* vx, const double* vy, std::size_t n, double dt) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    _mm256_storeu_pd(x + p, _mm256_fmadd_pd(_mm256_loadu_pd(vx + p), vdt, _mm256_loadu_pd(x + p)));
    _mm256_storeu_pd(y + p, _mm256_fmadd_pd(_mm256_loadu_pd(vy + p), vdt, _mm256_loadu_pd(y + p)));
  }
  if (p < n) scalar_kernels().stream(x + p, y + p, vx + p, vy + p, n - p, dt);
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", sum3, fluct_energy, accumulate_moments, velocity_half_step, rescale,
                                 stream};
  return &table;
}

}  // namespace fefp::simd
