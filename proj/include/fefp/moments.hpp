#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fefp/kinetics.hpp"
#include "fefp/polynomial.hpp"

namespace fefp {

/// Number of multi-indices with total order <= kMaxOrder (= C(11, 3)).
inline constexpr int kNumMoments = 165;

/// Dense enumeration of multi-indices up to kMaxOrder. The order is
/// lexicographic in (a1, a2, a3) with a1 outermost, which is exactly the order
/// in which the accumulation kernels emit monomials.
class MomentIndex {
 public:
  static int of(MultiIndex alpha);
  static int of(int a1, int a2, int a3) { return of(MultiIndex(a1, a2, a3)); }
  static MultiIndex at(int idx);
};

/// Central velocity moments of one cell, m~_alpha = <(v - U)^alpha, f>, stored
/// mass-weighted (m~_0 = rho). Contracted quantities are exposed through
/// accessors; other modules never index raw entries by hand.
struct MomentSet {
  std::array<double, kNumMoments> central{};
  double rho = 0.0;
  Vec3 U{0.0, 0.0, 0.0};
  std::size_t sample_count = 0;
  int max_order = kMaxOrder;

  double operator[](MultiIndex alpha) const { return central[static_cast<std::size_t>(MomentIndex::of(alpha))]; }
  double at(int a1, int a2, int a3) const { return (*this)[MultiIndex(a1, a2, a3)]; }

  /// <|v'|^2>/(3 rho)
  double theta() const;
  double pressure() const { return rho * theta(); }
  /// Pi_ij = m~_{e_i + e_j}
  double Pi(int i, int j) const;
  /// sigma_ij = Pi_ij - p delta_ij (trace free)
  double sigma(int i, int j) const;
  /// q_i = <v'_i |v'|^2>/2
  double heat_flux(int i) const;
  /// <|v'|^(2k)>
  double norm_moment(int two_k) const;
  /// <v'_i |v'|^(2k)>
  double vector_moment(int i, int two_k) const;
};

/// Sparse linear functional over the dense central-moment table; the compiled
/// form of expectation(P, .) used in per-cell hot paths.
class MomentFunctional {
 public:
  MomentFunctional() = default;
  explicit MomentFunctional(const Polynomial& p);

  double operator()(const MomentSet& m) const noexcept {
    double s = 0.0;
    for (const auto& [idx, c] : terms_) s += c * m.central[static_cast<std::size_t>(idx)];
    return s;
  }
  int degree() const noexcept { return degree_; }

 private:
  std::vector<std::pair<int, double>> terms_;
  int degree_ = -1;
};

/// <P(v'), f> from the central moment table. Throws std::out_of_range when the
/// polynomial degree exceeds the moments available.
double expectation(const Polynomial& p, const MomentSet& m);

/// Central moments of rho * N(0, Pi) via the Isserlis/Wick pairing recursion.
/// Throws std::invalid_argument if Pi is not symmetric positive definite.
MomentSet gaussian_central_moments(const std::array<std::array<double, 3>, 3>& Pi, double rho,
                                   int max_order = kMaxOrder, const Vec3& U = {0.0, 0.0, 0.0});

/// Monte Carlo estimate from the particle velocities of one cell:
/// U = sample mean, m~_alpha = rho / N * sum (v - U)^alpha.
/// Throws DegenerateCellError when fewer than two samples are given.
MomentSet estimate_central_moments(std::span<const double> vx, std::span<const double> vy,
                                   std::span<const double> vz, double rho, int max_order = kMaxOrder);

}  // namespace fefp
