#pragma once

// Independent reference computations shared by the unit tests. None of
// these call into the code paths they are used to check.

#include <cmath>
#include <complex>

#include "mbloch/lie.hpp"
#include "mbloch/random.hpp"

namespace mbloch::testing {

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

/// sum_{k < terms} X^k / k!.
inline Matrix series_exp(const Matrix& x, int terms = 30) {
  Matrix term = identity(static_cast<int>(x.rows()));
  Matrix acc = term;
  for (int k = 1; k < terms; ++k) {
    term = term * x / static_cast<double>(k);
    acc += term;
  }
  return acc;
}

/// sum_{k < terms} ad_X^k(Y) / k!.
inline Matrix series_ad(const Matrix& x, const Matrix& y, int terms = 20) {
  Matrix term = y;
  Matrix acc = y;
  for (int k = 1; k < terms; ++k) {
    term = (x * term - term * x) / static_cast<double>(k);
    acc += term;
  }
  return acc;
}

/// Unitary polar factor by the Newton iteration X <- (X + X^-dagger) / 2,
/// followed by the n-th-root determinant phase correction.
inline Matrix newton_polar_su(const Matrix& a) {
  Matrix x = a;
  for (int it = 0; it < 60; ++it) {
    const Matrix next = 0.5 * (x + Matrix(x.inverse().adjoint()));
    const double step = (next - x).norm();
    x = next;
    if (step < 1e-15) break;
  }
  const int n = static_cast<int>(x.rows());
  const double phase = std::arg(x.determinant());
  return x * std::polar(1.0, -phase / n);
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline AlgebraElement su2(double a, Complex offdiag) {
  Matrix m(2, 2);
  m << Complex(0.0, a), offdiag, -std::conj(offdiag), Complex(0.0, -a);
  return AlgebraElement::from_matrix(m);
}

}  // namespace mbloch::testing
