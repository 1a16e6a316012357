#include "fefp/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "fefp/error.hpp"

namespace fefp {

Polynomial::Polynomial(double constant) { add_term(MultiIndex{}, constant); }

Polynomial Polynomial::monomial(MultiIndex alpha, double coeff) {
  Polynomial p;
  p.add_term(alpha, coeff);
  return p;
}

Polynomial Polynomial::component(int i) {
  MultiIndex a;
  a.a[static_cast<std::size_t>(i)] = 1;
  return monomial(a);
}

Polynomial Polynomial::norm2_pow(int k) {
  Polynomial sq = monomial({2, 0, 0}) + monomial({0, 2, 0}) + monomial({0, 0, 2});
  Polynomial out(1.0);
  for (int j = 0; j < k; ++j) out = out * sq;
  return out;
}

int Polynomial::degree() const noexcept {
  int d = -1;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.order());
  return d;
}

double Polynomial::coeff(MultiIndex alpha) const {
  const auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::evaluate(double v1, double v2, double v3) const {
  std::array<std::array<double, kMaxOrder + 1>, 3> pw{};
  const std::array<double, 3> v{v1, v2, v3};
  for (int i = 0; i < 3; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= kMaxOrder; ++k) pw[i][k] = pw[i][k - 1] * v[i];
  }
  double s = 0.0;
  for (const auto& [alpha, c] : terms_) s += c * pw[0][alpha[0]] * pw[1][alpha[1]] * pw[2][alpha[2]];
  return s;
}

void Polynomial::add_term(MultiIndex alpha, double c) {
  if (alpha.order() > kMaxOrder)
    throw DegreeOverflowError("polynomial degree exceeds " + std::to_string(kMaxOrder));
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [alpha, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [x, cx] : a.terms_)
    for (const auto& [y, cy] : b.terms_)
      out.add_term(MultiIndex(x[0] + y[0], x[1] + y[1], x[2] + y[2]), cx * cy);
  return out;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out;
  const auto k = static_cast<std::size_t>(i);
  for (const auto& [alpha, c] : terms_) {
    if (alpha.a[k] == 0) continue;
    MultiIndex d = alpha;
    d.a[k] -= 1;
    out.add_term(d, c * alpha.a[k]);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    for (int i = 0; i < 3; ++i)
      if (alpha[i] > 0) os << "*v" << (i + 1) << (alpha[i] > 1 ? "^" + std::to_string(alpha[i]) : "");
  }
  return os.str();
}

Polynomial poly_mul(const Polynomial& p, const Polynomial& q) { return p * q; }

VectorPoly gradient(const Polynomial& p) { return {p.derivative(0), p.derivative(1), p.derivative(2)}; }

Polynomial laplacian(const Polynomial& p) {
  Polynomial out;
  for (int i = 0; i < 3; ++i) out += p.derivative(i).derivative(i);
  return out;
}

Polynomial divergence(const VectorPoly& field) {
  Polynomial out;
  for (int i = 0; i < 3; ++i) out += field[static_cast<std::size_t>(i)].derivative(i);
  return out;
}

Polynomial dot(const VectorPoly& f, const VectorPoly& g) {
  Polynomial out;
  for (std::size_t i = 0; i < 3; ++i) out += f[i] * g[i];
  return out;
}

Polynomial grad_dot(const Polynomial& p, const Polynomial& q) { return dot(gradient(p), gradient(q)); }

}  // namespace fefp
