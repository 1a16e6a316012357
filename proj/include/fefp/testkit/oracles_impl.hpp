#pragma once

#include <cmath>

namespace fefp::testkit {

namespace detail {
/// Lower Cholesky factor of a 3x3 SPD matrix; throws on failure.
Matrix3 chol3(const Matrix3& A);
}  // namespace detail

template <class G>
void for_each_node(const AnalyticDensity& f, G&& g) {
  const GaussHermite& gh = GaussHermite::standard();
  const Vec3 U = f.mean();
  const std::size_t n = gh.nodes.size();
  for (const auto& comp : f.components) {
    const Matrix3 L = detail::chol3(comp.cov);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
          const double z[3] = {gh.nodes[a], gh.nodes[b], gh.nodes[c]};
          const double w = comp.weight * gh.weights[a] * gh.weights[b] * gh.weights[c];
          Vec3 v;
          for (std::size_t i = 0; i < 3; ++i)
            v[i] = comp.mean[i] - U[i] + L[i][0] * z[0] + L[i][1] * z[1] + L[i][2] * z[2];
          g(v, w);
        }
  }
}

template <class Rng>
AnalyticDensity random_mixture(Rng& rng) {
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  AnalyticDensity f;
  const int k = 1 + static_cast<int>(rng.uniform() * 3.0);
  const double rho = uni(0.3, 3.0);
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    GaussianComponent comp;
    comp.weight = uni(0.2, 1.0);
    total += comp.weight;
    for (auto& m : comp.mean) m = uni(-1.0, 1.0);
    // A A^T + d I is SPD
    Matrix3 A{};
    for (auto& row : A)
      for (auto& x : row) x = uni(-0.8, 0.8);
    const double d = uni(0.2, 0.8);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = i == j ? d : 0.0;
        for (std::size_t l = 0; l < 3; ++l) s += A[i][l] * A[j][l];
        comp.cov[i][j] = s;
      }
    f.components.push_back(comp);
  }
  for (auto& comp : f.components) comp.weight *= rho / total;
  return f;
}

}  // namespace fefp::testkit
