#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "fefp/testkit/oracles.hpp"

namespace fefp::testkit {

namespace {

// Physicists' Hermite roots by Newton on the normalized recurrence, then
// mapped to the probabilists' weight.
GaussHermite build(int n) {
  GaussHermite gh;
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  double z = 0.0;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  for (int i = 0; i < m; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1) z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * x[1];
    else z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
  }
  // int e^{-x^2} g(x) dx -> E[g(Z)] with Z = sqrt(2) x
  for (int i = 0; i < n; ++i) {
    gh.nodes.push_back(std::sqrt(2.0) * x[static_cast<std::size_t>(i)]);
    gh.weights.push_back(w[static_cast<std::size_t>(i)] / std::sqrt(std::numbers::pi));
  }
  return gh;
}

}  // namespace

const GaussHermite& GaussHermite::standard(int n) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

namespace detail {

Matrix3 chol3(const Matrix3& A) {
  Matrix3 L{};
  for (std::size_t j = 0; j < 3; ++j) {
    double d = A[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (!(d > 0.0)) throw std::invalid_argument("covariance not positive definite");
    L[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < 3; ++i) {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  return L;
}

}  // namespace detail

}  // namespace fefp::testkit
