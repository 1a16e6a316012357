#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fefp/testkit/oracles.hpp"

namespace fefp::testkit {

AnalyticDensity AnalyticDensity::gaussian(const Matrix3& Pi, double rho, const Vec3& U) {
  AnalyticDensity f;
  f.components.push_back({rho, U, Pi});
  f.validate();
  return f;
}

double AnalyticDensity::rho() const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight;
  return s;
}

Vec3 AnalyticDensity::mean() const {
  Vec3 m{};
  const double r = rho();
  for (const auto& c : components)
    for (std::size_t i = 0; i < 3; ++i) m[i] += c.weight * c.mean[i] / r;
  return m;
}

void AnalyticDensity::validate() const {
  if (components.empty()) throw std::invalid_argument("density has no components");
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    detail::chol3(c.cov);
  }
}

double quadrature_expectation(const AnalyticDensity& f, const Polynomial& P) {
  if (P.degree() > 2 * kNodesPerAxis - 1) throw std::invalid_argument("quadrature: polynomial degree too high");
  double s = 0.0;
  for_each_node(f, [&](const Vec3& v, double w) { s += w * P.evaluate(v[0], v[1], v[2]); });
  return s;
}

MomentSet quadrature_moments(const AnalyticDensity& f, int max_order) {
  MomentSet m;
  m.rho = f.rho();
  m.U = f.mean();
  m.max_order = max_order;
  for_each_node(f, [&](const Vec3& v, double w) {
    std::array<double, kMaxOrder + 1> px{}, py{}, pz{};
    px[0] = py[0] = pz[0] = 1.0;
    for (int k = 1; k <= kMaxOrder; ++k) {
      px[static_cast<std::size_t>(k)] = px[static_cast<std::size_t>(k - 1)] * v[0];
      py[static_cast<std::size_t>(k)] = py[static_cast<std::size_t>(k - 1)] * v[1];
      pz[static_cast<std::size_t>(k)] = pz[static_cast<std::size_t>(k - 1)] * v[2];
    }
    for (int idx = 0; idx < kNumMoments; ++idx) {
      const MultiIndex a = MomentIndex::at(idx);
      m.central[static_cast<std::size_t>(idx)] +=
          w * px[static_cast<std::size_t>(a[0])] * py[static_cast<std::size_t>(a[1])] * pz[static_cast<std::size_t>(a[2])];
    }
  });
  for (int i = 0; i < 3; ++i) {
    MultiIndex e;
    e.a[static_cast<std::size_t>(i)] = 1;
    m.central[static_cast<std::size_t>(MomentIndex::of(e))] = 0.0;
  }
  return m;
}

double operator_projection(const AnalyticDensity& f, const DriftPolynomial& drift, double D, const Polynomial& H) {
  const VectorPoly g = gradient(H);
  const Polynomial lap = laplacian(H);
  double s = 0.0;
  for_each_node(f, [&](const Vec3& v, double w) {
    const Vec3 a = drift.eval(v);
    double gdotA = 0.0;
    for (int i = 0; i < 3; ++i) gdotA += g[static_cast<std::size_t>(i)].evaluate(v[0], v[1], v[2]) * a[static_cast<std::size_t>(i)];
    s += w * (gdotA + D * lap.evaluate(v[0], v[1], v[2]));
  });
  return s;
}

double operator_projection(const AnalyticDensity& f, const closure::DriftCoefficients& c, const Polynomial& H) {
  const VectorPoly g = gradient(H);
  const Polynomial lap = laplacian(H);
  double s = 0.0;
  for_each_node(f, [&](const Vec3& v, double w) {
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double c2v = c.c2[0] * v[0] + c.c2[1] * v[1] + c.c2[2] * v[2];
    double gdotA = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      double a = c.c0[i] - v[i] / c.tau + c.c2[i] * r2 + 2.0 * v[i] * c2v + 4.0 * c.c3 * v[i] * r2 -
                 c.c4 * v[i] * r2 * r2;
      for (std::size_t j = 0; j < 3; ++j) a += c.c1_sym[i][j] * v[j];
      gdotA += g[i].evaluate(v[0], v[1], v[2]) * a;
    }
    s += w * (gdotA + c.diffusion * lap.evaluate(v[0], v[1], v[2]));
  });
  return s;
}

AnalyticDensity bi_gaussian(double shift, double var_plus, double var_minus, double rho) {
  AnalyticDensity f;
  GaussianComponent a, b;
  a.weight = b.weight = 0.5 * rho;
  a.mean = {shift, 0.0, 0.0};
  b.mean = {-shift, 0.0, 0.0};
  a.cov = {{{var_plus, 0, 0}, {0, var_plus, 0}, {0, 0, var_plus}}};
  b.cov = {{{var_minus, 0, 0}, {0, var_minus, 0}, {0, 0, var_minus}}};
  f.components = {a, b};
  f.validate();
  return f;
}

RateFit fd_rate(std::span<const double> t, std::span<const double> values) {
  const std::size_t n = t.size();
  if (n != values.size() || n < 2) throw std::invalid_argument("fd_rate: need at least two matching points");
  double st = 0.0, sy = 0.0;
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(values[k] > 0.0)) throw std::invalid_argument("fd_rate: values must be positive");
    y[k] = std::log(values[k]);
    st += t[k];
    sy += y[k];
  }
  const double tm = st / static_cast<double>(n), ym = sy / static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    sty += (t[k] - tm) * (y[k] - ym);
  }
  RateFit fit;
  fit.rate = sty / stt;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = y[k] - ym - fit.rate * (t[k] - tm);
      sse += r * r;
    }
    fit.stderr_rate = std::sqrt(sse / static_cast<double>(n - 2) / stt);
  }
  return fit;
}

std::array<double, 3> symmetric_eigenvalues(Matrix3 A) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        if (A[p][q] == 0.0) continue;
        const double theta = 0.5 * (A[q][q] - A[p][p]) / A[p][q];
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < 3; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::array<double, 3> ev{A[0][0], A[1][1], A[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace fefp::testkit
