#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

namespace fefp {

/// Largest total degree handled by the polynomial and moment machinery.
inline constexpr int kMaxOrder = 8;

/// Exponents (a1, a2, a3) of a monomial v1^a1 v2^a2 v3^a3.
struct MultiIndex {
  std::array<std::uint8_t, 3> a{0, 0, 0};

  constexpr MultiIndex() = default;
  constexpr MultiIndex(int a1, int a2, int a3)
      : a{static_cast<std::uint8_t>(a1), static_cast<std::uint8_t>(a2), static_cast<std::uint8_t>(a3)} {}

  constexpr int order() const noexcept { return a[0] + a[1] + a[2]; }
  constexpr int operator[](int i) const noexcept { return a[static_cast<std::size_t>(i)]; }
  constexpr auto operator<=>(const MultiIndex&) const = default;
};

class Polynomial;
using VectorPoly = std::array<Polynomial, 3>;

/// Sparse polynomial over the three velocity components with real
/// coefficients. Zero coefficients are never stored; total degree is capped
/// at kMaxOrder and exceeding it raises DegreeOverflowError.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double>;

  Polynomial() = default;
  explicit Polynomial(double constant);

  static Polynomial monomial(MultiIndex alpha, double coeff = 1.0);
  /// v_i
  static Polynomial component(int i);
  /// |v|^(2k) expanded as (v1^2 + v2^2 + v3^2)^k.
  static Polynomial norm2_pow(int k);

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const noexcept;
  double coeff(MultiIndex alpha) const;

  double evaluate(double v1, double v2, double v3) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Partial derivative with respect to v_i.
  Polynomial derivative(int i) const;

  std::string to_string() const;

 private:
  void add_term(MultiIndex alpha, double c);
  Terms terms_;
};

Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
VectorPoly gradient(const Polynomial& p);
Polynomial laplacian(const Polynomial& p);
Polynomial divergence(const VectorPoly& field);
/// grad P . grad Q
Polynomial grad_dot(const Polynomial& p, const Polynomial& q);
/// F . G for vector fields.
Polynomial dot(const VectorPoly& f, const VectorPoly& g);

}  // namespace fefp
