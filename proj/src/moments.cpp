#include "fefp/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fefp/error.hpp"
#include "fefp/simd/kernels.hpp"

namespace fefp {

namespace {

struct IndexTables {
  std::array<std::array<std::array<int, kMaxOrder + 1>, kMaxOrder + 1>, kMaxOrder + 1> lookup{};
  std::array<MultiIndex, kNumMoments> inverse{};

  IndexTables() {
    int k = 0;
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; a + b <= kMaxOrder; ++b)
        for (int c = 0; a + b + c <= kMaxOrder; ++c) {
          lookup[a][b][c] = k;
          inverse[static_cast<std::size_t>(k)] = MultiIndex(a, b, c);
          ++k;
        }
  }
};

const IndexTables& tables() {
  static const IndexTables t;
  return t;
}

}  // namespace

int MomentIndex::of(MultiIndex alpha) {
  if (alpha.order() > kMaxOrder) throw std::out_of_range("moment order exceeds kMaxOrder");
  return tables().lookup[alpha[0]][alpha[1]][alpha[2]];
}

MultiIndex MomentIndex::at(int idx) { return tables().inverse.at(static_cast<std::size_t>(idx)); }

double MomentSet::theta() const {
  if (rho <= 0.0) return 0.0;
  return (at(2, 0, 0) + at(0, 2, 0) + at(0, 0, 2)) / (3.0 * rho);
}

double MomentSet::Pi(int i, int j) const {
  MultiIndex a;
  a.a[static_cast<std::size_t>(i)] += 1;
  a.a[static_cast<std::size_t>(j)] += 1;
  return (*this)[a];
}

double MomentSet::sigma(int i, int j) const { return Pi(i, j) - (i == j ? pressure() : 0.0); }

double MomentSet::heat_flux(int i) const { return 0.5 * vector_moment(i, 2); }

double MomentSet::norm_moment(int two_k) const {
  static thread_local std::array<MomentFunctional, kMaxOrder / 2 + 1> cache = [] {
    std::array<MomentFunctional, kMaxOrder / 2 + 1> c;
    for (int k = 0; k <= kMaxOrder / 2; ++k) c[static_cast<std::size_t>(k)] = MomentFunctional(Polynomial::norm2_pow(k));
    return c;
  }();
  if (two_k % 2 != 0 || two_k < 0 || two_k > max_order) throw std::out_of_range("norm_moment: bad order");
  return cache[static_cast<std::size_t>(two_k / 2)](*this);
}

double MomentSet::vector_moment(int i, int two_k) const {
  if (two_k % 2 != 0 || two_k < 0 || two_k + 1 > max_order) throw std::out_of_range("vector_moment: bad order");
  if (i < 0 || i > 2) throw std::out_of_range("vector_moment: bad component");
  static thread_local std::array<std::array<MomentFunctional, 3>, kMaxOrder / 2> cache = [] {
    std::array<std::array<MomentFunctional, 3>, kMaxOrder / 2> c;
    for (int k = 0; k < kMaxOrder / 2; ++k)
      for (int d = 0; d < 3; ++d)
        c[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] =
            MomentFunctional(Polynomial::component(d) * Polynomial::norm2_pow(k));
    return c;
  }();
  return cache[static_cast<std::size_t>(two_k / 2)][static_cast<std::size_t>(i)](*this);
}

MomentFunctional::MomentFunctional(const Polynomial& p) : degree_(p.degree()) {
  terms_.reserve(p.terms().size());
  for (const auto& [alpha, c] : p.terms()) terms_.emplace_back(MomentIndex::of(alpha), c);
}

double expectation(const Polynomial& p, const MomentSet& m) {
  if (p.degree() > m.max_order)
    throw std::out_of_range("expectation: polynomial degree " + std::to_string(p.degree()) +
                            " exceeds available moment order " + std::to_string(m.max_order));
  double s = 0.0;
  for (const auto& [alpha, c] : p.terms()) s += c * m[alpha];
  return s;
}

namespace {

bool is_spd(const std::array<std::array<double, 3>, 3>& A) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(A[i][j] - A[j][i]) > 1e-12 * (std::abs(A[i][j]) + std::abs(A[j][i]) + 1e-300)) return false;
  const double d1 = A[0][0];
  const double d2 = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const double d3 = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                    A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                    A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  return d1 > 0.0 && d2 > 0.0 && d3 > 0.0;
}

}  // namespace

MomentSet gaussian_central_moments(const std::array<std::array<double, 3>, 3>& Pi, double rho, int max_order,
                                   const Vec3& U) {
  if (!is_spd(Pi)) throw std::invalid_argument("gaussian_central_moments: covariance is not SPD");
  if (max_order < 0 || max_order > kMaxOrder) throw std::invalid_argument("gaussian_central_moments: bad max_order");
  MomentSet m;
  m.rho = rho;
  m.U = U;
  m.max_order = max_order;
  // E[z^alpha] = sum_j Pi_ij beta_j E[z^(beta - e_j)], beta = alpha - e_i.
  std::array<double, kNumMoments> unit{};
  for (int n = 0; n <= max_order; ++n) {
    for (int k = 0; k < kNumMoments; ++k) {
      const MultiIndex alpha = MomentIndex::at(k);
      if (alpha.order() != n) continue;
      if (n == 0) {
        unit[static_cast<std::size_t>(k)] = 1.0;
        continue;
      }
      int i = 0;
      while (alpha[i] == 0) ++i;
      MultiIndex beta = alpha;
      beta.a[static_cast<std::size_t>(i)] -= 1;
      double s = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (beta[j] == 0) continue;
        MultiIndex gamma = beta;
        gamma.a[static_cast<std::size_t>(j)] -= 1;
        s += Pi[i][j] * beta[j] * unit[static_cast<std::size_t>(MomentIndex::of(gamma))];
      }
      unit[static_cast<std::size_t>(k)] = s;
    }
  }
  for (int k = 0; k < kNumMoments; ++k) m.central[static_cast<std::size_t>(k)] = rho * unit[static_cast<std::size_t>(k)];
  return m;
}

MomentSet estimate_central_moments(std::span<const double> vx, std::span<const double> vy,
                                   std::span<const double> vz, double rho, int max_order) {
  const std::size_t n = vx.size();
  if (n < 2) throw DegenerateCellError("estimate_central_moments: need at least two samples");
  const auto& k = simd::active_kernels();
  Vec3 sum{};
  k.sum3(vx.data(), vy.data(), vz.data(), n, sum.data());
  MomentSet m;
  m.rho = rho;
  m.max_order = max_order;
  m.sample_count = n;
  const double inv_n = 1.0 / static_cast<double>(n);
  m.U = {sum[0] * inv_n, sum[1] * inv_n, sum[2] * inv_n};
  if (max_order < 2 || max_order > kMaxOrder) throw std::invalid_argument("estimate_central_moments: bad max_order");
  k.accumulate_moments(vx.data(), vy.data(), vz.data(), n, m.U.data(), m.central.data(), max_order);
  const double scale = rho * inv_n;
  for (auto& c : m.central) c *= scale;
  // First central moments vanish analytically; remove the roundoff residue.
  m.central[static_cast<std::size_t>(MomentIndex::of(1, 0, 0))] = 0.0;
  m.central[static_cast<std::size_t>(MomentIndex::of(0, 1, 0))] = 0.0;
  m.central[static_cast<std::size_t>(MomentIndex::of(0, 0, 1))] = 0.0;
  return m;
}

}  // namespace fefp
