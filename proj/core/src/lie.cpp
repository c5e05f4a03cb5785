#include "mbloch/lie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mbloch {
namespace {

void require_same_dim(int a, int b, const char* where) {
  if (a != b) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_valid_dim(int n) {
  if (n < 1 || n > kMaxDim) {
    throw DimensionError("matrix dimension " + std::to_string(n) +
                         " outside [1, " + std::to_string(kMaxDim) + "]");
  }
}

Matrix identity_matrix(int n) { return Matrix::Identity(n, n); }

}  // namespace

AlgebraElement AlgebraElement::zero(int n) {
  require_valid_dim(n);
  return AlgebraElement(Matrix::Zero(n, n));
}

AlgebraElement AlgebraElement::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("algebra element must be square");
  require_valid_dim(static_cast<int>(m.rows()));
  const double scale = std::max(1.0, m.norm());
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvariantError("matrix is not skew-Hermitian");
  }
  if (std::abs(m.trace()) > 1e-12 * scale) {
    throw InvariantError("matrix is not traceless");
  }
  return AlgebraElement(m);
}

AlgebraElement AlgebraElement::imaginary_diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  require_valid_dim(n);
  Matrix m = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = Complex(0.0, d[k]);
  return from_matrix(m);
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  require_same_dim(dim(), o.dim(), "algebra +");
  m_ += o.m_;
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  require_same_dim(dim(), o.dim(), "algebra -");
  m_ -= o.m_;
  return *this;
}

GroupElement GroupElement::identity(int n) {
  require_valid_dim(n);
  return GroupElement(identity_matrix(n));
}

GroupElement GroupElement::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("group element must be square");
  require_valid_dim(static_cast<int>(m.rows()));
  if (unitarity_defect(m) > 1e-10) throw InvariantError("matrix is not unitary");
  if (std::abs(m.determinant() - 1.0) > 1e-10) {
    throw InvariantError("matrix determinant is not 1");
  }
  return GroupElement(m);
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_dim(x.dim(), y.dim(), "bracket");
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  return AlgebraElement::unchecked(a * b - b * a);
}

double inner(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_dim(x.dim(), y.dim(), "inner");
  // -Tr(XY) = -sum_jk X_jk Y_kj, without forming the product.
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  Complex acc = 0.0;
  for (int j = 0; j < a.rows(); ++j)
    for (int k = 0; k < a.cols(); ++k) acc += a(j, k) * b(k, j);
  return -acc.real();
}

double norm(const AlgebraElement& x) { return std::sqrt(std::max(0.0, inner(x, x))); }

AlgebraElement adjoint_conj(const GroupElement& g, const AlgebraElement& x) {
  require_same_dim(g.dim(), x.dim(), "adjoint_conj");
  return AlgebraElement::unchecked(g.matrix() * x.matrix() * g.matrix().adjoint());
}

GroupElement exp_algebra(const AlgebraElement& x) {
  const int n = x.dim();
  const Matrix& a = x.matrix();
  if (n == 2) {
    // X^2 = -det(X) I with det(X) = |X_00|^2 + |X_01|^2 = ||X||_F^2 / 2.
    const double theta = std::sqrt(0.5 * a.squaredNorm());
    const double c = std::cos(theta);
    const double sinc = theta < 1e-4
                            ? 1.0 - theta * theta / 6.0 + std::pow(theta, 4) / 120.0
                            : std::sin(theta) / theta;
    Matrix r = sinc * a;
    r(0, 0) += c;
    r(1, 1) += c;
    return GroupElement::unchecked(r);
  }
  const double nrm = a.norm();
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Matrix y = a * std::ldexp(1.0, -squarings);
  Matrix result = identity_matrix(n);
  Matrix term = identity_matrix(n);
  for (int k = 1; k <= 18; ++k) {
    term = term * y / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return GroupElement::unchecked(result);
}

double unitarity_defect(const Matrix& g) {
  return (g.adjoint() * g - identity_matrix(static_cast<int>(g.rows()))).norm();
}

GroupElement reunitarize(const Matrix& approx) {
  if (approx.rows() != approx.cols()) throw DimensionError("reunitarize: not square");
  const int n = static_cast<int>(approx.rows());
  require_valid_dim(n);
  if (!approx.allFinite()) throw NumericalBlowup("reunitarize: non-finite input", 0.0);
  Eigen::JacobiSVD<Matrix> svd(approx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double dist2 = 0.0;
  for (int k = 0; k < n; ++k) dist2 += (s(k) - 1.0) * (s(k) - 1.0);
  if (std::sqrt(dist2) > 0.5) {
    throw NumericalBlowup("reunitarize: input is " + std::to_string(std::sqrt(dist2)) +
                              " from the unitary group",
                          0.0);
  }
  Matrix u = svd.matrixU() * svd.matrixV().adjoint();
  const double phase = std::arg(u.determinant());
  u *= std::polar(1.0, -phase / n);
  return GroupElement::unchecked(u);
}

AlgebraElement project_to_algebra(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Matrix a = 0.5 * (m - m.adjoint());
  const Complex tr = a.trace() / static_cast<double>(n);
  for (int k = 0; k < n; ++k) a(k, k) -= tr;
  return AlgebraElement::unchecked(a);
}

TorusFrame TorusFrame::diagonal(int n) {
  require_valid_dim(n);
  TorusFrame f;
  f.n_ = n;
  for (int k = 1; k < n; ++k) {
    Matrix m = Matrix::Zero(n, n);
    for (int j = 0; j < k; ++j) m(j, j) = Complex(0.0, 1.0);
    m(k, k) = Complex(0.0, -static_cast<double>(k));
    f.basis_.push_back(AlgebraElement::unchecked(m));
  }
  return f;
}

TorusFrame TorusFrame::from_basis(std::vector<AlgebraElement> basis) {
  if (basis.empty()) throw std::invalid_argument("torus frame needs at least one element");
  const int n = basis.front().dim();
  for (std::size_t a = 0; a < basis.size(); ++a) {
    require_same_dim(n, basis[a].dim(), "torus frame");
    if (norm(basis[a]) == 0.0) throw InvariantError("torus frame element is zero");
    for (std::size_t b = a + 1; b < basis.size(); ++b) {
      const double scale = norm(basis[a]) * norm(basis[b]);
      if (std::abs(inner(basis[a], basis[b])) > 1e-12 * std::max(1.0, scale)) {
        throw InvariantError("torus frame elements are not orthogonal");
      }
      if (norm(bracket(basis[a], basis[b])) > 1e-12 * std::max(1.0, scale)) {
        throw InvariantError("torus frame elements do not commute");
      }
    }
  }
  TorusFrame f;
  f.n_ = n;
  f.basis_ = std::move(basis);
  return f;
}

TorusFrame TorusFrame::conjugated(const GroupElement& h) const {
  TorusFrame f;
  f.n_ = n_;
  for (const auto& b : basis_) f.basis_.push_back(adjoint_conj(h, b));
  return f;
}

AlgebraElement TorusFrame::combine(std::span<const double> coeffs) const {
  if (coeffs.size() > basis_.size()) {
    throw DimensionError("torus frame: " + std::to_string(coeffs.size()) +
                         " coefficients for a rank-" + std::to_string(basis_.size()) +
                         " torus");
  }
  AlgebraElement r = AlgebraElement::zero(n_);
  for (std::size_t k = 0; k < coeffs.size(); ++k) r += coeffs[k] * basis_[k];
  return r;
}

bool TorusFrame::contains(const AlgebraElement& x, double tol) const {
  return norm(x - torus_project(x, *this)) <= tol;
}

AlgebraElement torus_project(const AlgebraElement& x, const TorusFrame& frame) {
  require_same_dim(x.dim(), frame.dim(), "torus_project");
  AlgebraElement r = AlgebraElement::zero(x.dim());
  for (const auto& b : frame.basis()) r += (inner(x, b) / inner(b, b)) * b;
  return r;
}

Diagonalization diagonalize_skew(const AlgebraElement& rho) {
  const int n = rho.dim();
  Diagonalization out;
  if (rho.matrix().norm() <= 1e-14) {
    out.g = GroupElement::identity(n);
    out.tau = AlgebraElement::zero(n);
    out.degenerate = true;
    out.near_degenerate = true;
    return out;
  }
  // rho = i H with H Hermitian; eigenvalues of rho are i * eig(H).
  const Matrix h = Complex(0.0, -1.0) * rho.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw InvariantError("diagonalize_skew: eigensolver failed");
  const auto& evals = es.eigenvalues();  // ascending
  const Matrix& evecs = es.eigenvectors();

  Matrix g(n, n);
  Matrix tau = Matrix::Zero(n, n);
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;  // descending
    tau(k, k) = Complex(0.0, evals(src));
    if (k > 0) out.min_gap = std::min(out.min_gap, evals(src + 1) - evals(src));
    auto v = evecs.col(src);
    int lead = 0;
    double best = -1.0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(v(j)) > best * (1.0 + 1e-12) + 1e-300) {
        best = std::abs(v(j));
        lead = j;
      }
    }
    const Complex ph = std::polar(1.0, -std::arg(v(lead)));
    g.col(k) = v * ph;
  }
  out.near_degenerate = out.min_gap < 1e-12;
  const double det_phase = std::arg(g.determinant());
  g *= std::polar(1.0, -det_phase / n);
  out.g = GroupElement::unchecked(g);
  out.tau = AlgebraElement::unchecked(tau);
  return out;
}

}  // namespace mbloch
