#pragma once

// Linear algebra on su(n) and SU(n) for small n (2 <= n <= kMaxDim).
//
// Matrices use Eigen's dynamic storage with a compile-time upper bound, so
// every element lives on the stack and the hot loops never allocate.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mbloch {

inline constexpr int kMaxDim = 4;

using Complex = std::complex<double>;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::ColMajor, kMaxDim, kMaxDim>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvariantError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the time stepper leaves the group or produces non-finite
/// values. `last_good_time` is the last time at which the state was sane.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Traceless skew-Hermitian n x n matrix.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  static AlgebraElement zero(int n);
  /// Validates skew-Hermiticity and tracelessness (1e-12, scaled by the
  /// matrix norm when that exceeds one).
  static AlgebraElement from_matrix(const Matrix& m);
  /// Skips validation. For values that are in su(n) by construction.
  static AlgebraElement unchecked(const Matrix& m) { return AlgebraElement(m); }
  /// i * diag(d_0, ..., d_{n-1}); the d_k must sum to zero.
  static AlgebraElement imaginary_diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }
  friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }

 private:
  explicit AlgebraElement(const Matrix& m) : m_(m) {}
  Matrix m_;
};

/// Special unitary n x n matrix.
class GroupElement {
 public:
  GroupElement() = default;

  static GroupElement identity(int n);
  /// Validates unitarity and det = 1 to 1e-10.
  static GroupElement from_matrix(const Matrix& m);
  static GroupElement unchecked(const Matrix& m) { return GroupElement(m); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  /// g^{-1}, computed as g^dagger.
  GroupElement inverse() const { return GroupElement(m_.adjoint()); }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.m_ * b.m_);
  }

 private:
  explicit GroupElement(const Matrix& m) : m_(m) {}
  Matrix m_;
};

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

/// Trace form -Tr(XY). Positive definite on su(n).
double inner(const AlgebraElement& x, const AlgebraElement& y);
double norm(const AlgebraElement& x);

/// g X g^dagger.
AlgebraElement adjoint_conj(const GroupElement& g, const AlgebraElement& x);

/// Matrix exponential. Closed form for n = 2, scaling and squaring with a
/// truncated Taylor series otherwise.
GroupElement exp_algebra(const AlgebraElement& x);

/// Nearest special unitary matrix: unitary polar factor followed by an
/// n-th root determinant phase correction. Throws NumericalBlowup when the
/// input is farther than 0.5 (Frobenius) from the unitary group.
GroupElement reunitarize(const Matrix& approx);

/// ||g^dagger g - I||_F.
double unitarity_defect(const Matrix& g);

/// Skew-Hermitian traceless part of an arbitrary square matrix.
AlgebraElement project_to_algebra(const Matrix& m);

/// Orthogonal basis of a maximal abelian subalgebra.
class TorusFrame {
 public:
  TorusFrame() = default;

  /// Diagonal torus of su(n), spanned by i*diag(1,..,1,-k,0,..,0).
  static TorusFrame diagonal(int n);
  /// Validates pairwise orthogonality and commutativity.
  static TorusFrame from_basis(std::vector<AlgebraElement> basis);
  /// Frame conjugated by h: span{Ad_h b}.
  TorusFrame conjugated(const GroupElement& h) const;

  int dim() const { return n_; }
  const std::vector<AlgebraElement>& basis() const { return basis_; }
  /// sum_k coeffs[k] * basis[k]; missing trailing coefficients are zero.
  AlgebraElement combine(std::span<const double> coeffs) const;
  /// ||X - torus_project(X)|| <= tol.
  bool contains(const AlgebraElement& x, double tol = 1e-10) const;

 private:
  int n_ = 0;
  std::vector<AlgebraElement> basis_;
};

AlgebraElement torus_project(const AlgebraElement& x, const TorusFrame& frame);

struct Diagonalization {
  GroupElement g;
  AlgebraElement tau;          // i*diag(lambda_1 >= ... >= lambda_n)
  bool degenerate = false;     // rho == 0, returned (I, 0)
  bool near_degenerate = false;  // some spectral gap below 1e-12
  double min_gap = 0.0;
};

/// Factor rho = Ad_g(tau) with tau diagonal, imaginary parts sorted
/// descending. Phase convention: in each eigenvector the first component of
/// largest modulus is made real and nonnegative, then a global phase sets
/// det g = 1.
Diagonalization diagonalize_skew(const AlgebraElement& rho);

}  // namespace mbloch
