#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace fefp::linalg {

template <std::size_t N>
using Vector = std::array<double, N>;

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
Vector<N> matvec(const Matrix<N>& A, const Vector<N>& x) {
  Vector<N> y{};
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += A[i][j] * x[j];
    y[i] = s;
  }
  return y;
}

template <std::size_t N>
double dot(const Vector<N>& a, const Vector<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

/// Max column sum.
template <std::size_t N>
double norm1(const Matrix<N>& A) {
  double best = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::abs(A[i][j]);
    best = std::max(best, s);
  }
  return best;
}

/// Lower Cholesky factor, or nullopt if A is not numerically SPD.
template <std::size_t N>
std::optional<Matrix<N>> cholesky(const Matrix<N>& A) {
  Matrix<N> L{};
  for (std::size_t j = 0; j < N; ++j) {
    double d = A[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (!(d > 0.0)) return std::nullopt;
    L[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < N; ++i) {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  return L;
}

template <std::size_t N>
Vector<N> cholesky_solve(const Matrix<N>& L, Vector<N> b) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= L[i][k] * b[k];
    b[i] /= L[i][i];
  }
  for (std::size_t ii = N; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < N; ++k) b[ii] -= L[k][ii] * b[k];
    b[ii] /= L[ii][ii];
  }
  return b;
}

/// A^{-1} from its Cholesky factor; the result is symmetrized.
template <std::size_t N>
Matrix<N> cholesky_inverse(const Matrix<N>& L) {
  Matrix<N> inv{};
  for (std::size_t j = 0; j < N; ++j) {
    Vector<N> e{};
    e[j] = 1.0;
    const Vector<N> col = cholesky_solve(L, e);
    for (std::size_t i = 0; i < N; ++i) inv[i][j] = col[i];
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) inv[i][j] = inv[j][i] = 0.5 * (inv[i][j] + inv[j][i]);
  return inv;
}

/// Inverse of the leading (N-1)x(N-1) block of A, computed from A^{-1} by a
/// rank-one downdate: Abar^{-1} = X11 - x12 x21 / x22 where X = A^{-1}.
template <std::size_t N>
Matrix<N - 1> leading_block_inverse(const Matrix<N>& Ainv) {
  constexpr std::size_t M = N - 1;
  Matrix<M> out{};
  const double pivot = Ainv[M][M];
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) out[i][j] = Ainv[i][j] - Ainv[i][M] * Ainv[M][j] / pivot;
  return out;
}

/// Gaussian elimination with partial pivoting. Returns nullopt when a pivot
/// vanishes.
template <std::size_t N>
std::optional<Vector<N>> lu_solve(Matrix<N> A, Vector<N> b) {
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    if (A[piv][k] == 0.0 || !std::isfinite(A[piv][k])) return std::nullopt;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < N; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < N; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t ii = N; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < N; ++j) b[ii] -= A[ii][j] * b[j];
    b[ii] /= A[ii][ii];
  }
  return b;
}

}  // namespace fefp::linalg
