#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mbloch/lie.hpp"
#include "mbloch/random.hpp"
#include "support.hpp"

namespace mbloch {
namespace {

using testing::max_abs;
using testing::series_exp;

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

AlgebraElement half_sigma() {
  const double d[] = {0.5, -0.5};
  return AlgebraElement::imaginary_diagonal(d);
}

TEST(AlgebraElement, RejectsNonSkewAndTraceful) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  EXPECT_THROW(AlgebraElement::from_matrix(m), InvariantError);
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = kI;
  t(1, 1) = kI;
  EXPECT_THROW(AlgebraElement::from_matrix(t), InvariantError);
  EXPECT_THROW(AlgebraElement::zero(0), DimensionError);
  EXPECT_THROW(AlgebraElement::zero(kMaxDim + 1), DimensionError);
}

TEST(GroupElement, RejectsNonUnitaryAndWrongDeterminant) {
  EXPECT_THROW(GroupElement::from_matrix(2.0 * Matrix(Matrix::Identity(2, 2))), InvariantError);
  Matrix u = Matrix::Identity(2, 2);
  u(0, 0) = -1.0;  // unitary, det = -1
  EXPECT_THROW(GroupElement::from_matrix(u), InvariantError);
}

TEST(Bracket, SelfBracketVanishes) {
  Rng rng(1);
  const AlgebraElement x = random_algebra(rng, 3);
  EXPECT_EQ(max_abs(bracket(x, x).matrix()), 0.0);
}

TEST(Bracket, RhoSigmaOffDiagonal) {
  const Complex p(0.3, -0.8);
  Matrix rho(2, 2);
  rho << Complex(0.0, 0.4), kI * p, kI * std::conj(p), Complex(0.0, -0.4);
  const AlgebraElement r = AlgebraElement::from_matrix(rho);
  EXPECT_NEAR(std::abs(bracket(r, half_sigma())(0, 1) - p), 0.0, 1e-15);
}

TEST(Bracket, CommutingDiagonals) {
  const double a[] = {1.0, -1.0};
  EXPECT_EQ(max_abs(bracket(AlgebraElement::imaginary_diagonal(a), half_sigma()).matrix()), 0.0);
}

TEST(Bracket, DimensionMismatchThrows) {
  EXPECT_THROW(bracket(AlgebraElement::zero(2), AlgebraElement::zero(3)), DimensionError);
  EXPECT_THROW(inner(AlgebraElement::zero(2), AlgebraElement::zero(3)), DimensionError);
}

TEST(Inner, SigmaNormIsOneHalf) { EXPECT_DOUBLE_EQ(inner(half_sigma(), half_sigma()), 0.5); }

TEST(Inner, SymmetricAndAdInvariant) {
  Rng rng(2);
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 50; ++k) {
      const AlgebraElement x = random_algebra(rng, n, 1.5);
      const AlgebraElement y = random_algebra(rng, n, 0.7);
      const GroupElement g = random_group(rng, n);
      EXPECT_NEAR(inner(x, y), inner(y, x), 1e-15);
      EXPECT_NEAR(inner(adjoint_conj(g, x), adjoint_conj(g, y)), inner(x, y), 1e-12);
      EXPECT_NEAR(norm(adjoint_conj(g, x)), norm(x), 1e-12);
      EXPECT_GT(inner(x, x), 0.0);
    }
  }
}

TEST(Adjoint, IdentityAndTorusPhase) {
  Rng rng(3);
  const AlgebraElement x = random_algebra(rng, 2);
  EXPECT_LE(max_abs((adjoint_conj(GroupElement::identity(2), x) - x).matrix()), 0.0);
  const double theta = 0.37;
  Matrix g(2, 2);
  g << std::polar(1.0, theta), 0.0, 0.0, std::polar(1.0, -theta);
  const AlgebraElement ad = adjoint_conj(GroupElement::from_matrix(g), x);
  EXPECT_NEAR(std::abs(ad(0, 1) - std::polar(1.0, 2 * theta) * x(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ad(0, 0) - x(0, 0)), 0.0, 1e-15);
}

TEST(Exp, ZeroAndPiDiagonal) {
  EXPECT_EQ(max_abs(exp_algebra(AlgebraElement::zero(3)).matrix() - testing::identity(3)), 0.0);
  const double d[] = {kPi, -kPi};
  EXPECT_LT(max_abs(exp_algebra(AlgebraElement::imaginary_diagonal(d)).matrix() +
                    testing::identity(2)),
            1e-15);
}

TEST(Exp, ClosedFormMatchesSeriesOracle) {
  Rng rng(4);
  std::uniform_real_distribution<double> scale(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const AlgebraElement x = random_algebra(rng, 2, scale(rng));
    EXPECT_LT(max_abs(exp_algebra(x).matrix() - series_exp(x.matrix())), 1e-12);
  }
}

TEST(Exp, ScalingAndSquaringMatchesSeriesOracle) {
  Rng rng(5);
  for (int n = 3; n <= kMaxDim; ++n) {
    for (int k = 0; k < 50; ++k) {
      const AlgebraElement x = random_algebra(rng, n, 2.0);
      const GroupElement g = exp_algebra(x);
      EXPECT_LT(max_abs(g.matrix() - series_exp(x.matrix(), 40)), 1e-12);
      EXPECT_LT(unitarity_defect(g.matrix()), 1e-13);
      EXPECT_LT(std::abs(g.matrix().determinant() - 1.0), 1e-13);
    }
  }
}

TEST(Exp, AdjointMatchesAdSeries) {
  Rng rng(6);
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 30; ++k) {
      const AlgebraElement x = random_algebra(rng, n, 0.5);
      const AlgebraElement y = random_algebra(rng, n, 1.0);
      EXPECT_LT(max_abs(adjoint_conj(exp_algebra(x), y).matrix() -
                        testing::series_ad(x.matrix(), y.matrix())),
                1e-10);
    }
  }
}

TEST(Reunitarize, IdempotentOnGroupAndOnExp) {
  Rng rng(7);
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 30; ++k) {
      const GroupElement g = exp_algebra(random_algebra(rng, n, 2.0));
      EXPECT_LT(max_abs(reunitarize(g.matrix()).matrix() - g.matrix()), 1e-12);
    }
  }
}

TEST(Reunitarize, RemovesPositiveScaling) {
  const Matrix a = 1.001 * testing::identity(2);
  EXPECT_LT(max_abs(reunitarize(a).matrix() - testing::identity(2)), 1e-15);
}

TEST(Reunitarize, PerturbationSweepAgainstNewtonPolar) {
  Rng rng(8);
  std::normal_distribution<double> nd;
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 40; ++k) {
      const GroupElement g = random_group(rng, n);
      Matrix e(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) e(r, c) = Complex(nd(rng), nd(rng));
      e *= 1e-6 / e.norm();
      const Matrix fixed = reunitarize(g.matrix() + e).matrix();
      EXPECT_LT((fixed - g.matrix()).norm(), 1e-5);
      EXPECT_LT(max_abs(fixed - testing::newton_polar_su(g.matrix() + e)), 1e-12);
    }
  }
}

TEST(Reunitarize, FarFromGroupSignalsBlowup) {
  EXPECT_THROW(reunitarize(3.0 * testing::identity(2)), NumericalBlowup);
  Matrix bad = testing::identity(2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(reunitarize(bad), NumericalBlowup);
}

TEST(Jacobi, HoldsForRandomTriples) {
  Rng rng(9);
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 100; ++k) {
      const AlgebraElement x = random_algebra(rng, n), y = random_algebra(rng, n),
                           z = random_algebra(rng, n);
      const AlgebraElement j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
                               bracket(z, bracket(x, y));
      EXPECT_LT(j.matrix().norm(), 1e-12);
    }
  }
}

TEST(Inner, AdInvariance) {
  Rng rng(10);
  for (int k = 0; k < 100; ++k) {
    const AlgebraElement x = random_algebra(rng, 3), y = random_algebra(rng, 3),
                         z = random_algebra(rng, 3);
    EXPECT_NEAR(inner(bracket(z, x), y) + inner(x, bracket(z, y)), 0.0, 1e-12);
  }
}

TEST(TorusFrame, DiagonalFrameIsOrthogonalAndAbelian) {
  for (int n = 2; n <= kMaxDim; ++n) {
    const TorusFrame f = TorusFrame::diagonal(n);
    ASSERT_EQ(static_cast<int>(f.basis().size()), n - 1);
    for (std::size_t a = 0; a < f.basis().size(); ++a) {
      for (std::size_t b = a + 1; b < f.basis().size(); ++b) {
        EXPECT_NEAR(inner(f.basis()[a], f.basis()[b]), 0.0, 1e-15);
        EXPECT_LT(bracket(f.basis()[a], f.basis()[b]).matrix().norm(), 1e-12);
      }
    }
  }
}

TEST(TorusFrame, FromBasisValidates) {
  Rng rng(11);
  EXPECT_THROW(TorusFrame::from_basis({random_algebra(rng, 3), random_algebra(rng, 3)}),
               InvariantError);
  const GroupElement h = random_group(rng, 3);
  const TorusFrame f = TorusFrame::diagonal(3).conjugated(h);
  EXPECT_NO_THROW(TorusFrame::from_basis(f.basis()));
}

TEST(TorusProject, DiagonalKeptOffDiagonalRemovedResidualOrthogonal) {
  Rng rng(12);
  const TorusFrame frame = TorusFrame::diagonal(3);
  const double d[] = {0.3, 0.5, -0.8};
  const AlgebraElement diag = AlgebraElement::imaginary_diagonal(d);
  EXPECT_LT(max_abs((torus_project(diag, frame) - diag).matrix()), 1e-15);
  Matrix off = Matrix::Zero(3, 3);
  off(0, 2) = Complex(0.4, 0.1);
  off(2, 0) = -std::conj(off(0, 2));
  EXPECT_LT(max_abs(torus_project(AlgebraElement::from_matrix(off), frame).matrix()), 1e-15);
  for (int k = 0; k < 50; ++k) {
    const AlgebraElement x = random_algebra(rng, 3);
    const AlgebraElement r = x - torus_project(x, frame);
    for (const auto& b : frame.basis()) EXPECT_NEAR(inner(r, b), 0.0, 1e-14);
  }
  // A conjugated frame projects onto its own span.
  const GroupElement h = random_group(rng, 3);
  const TorusFrame turned = frame.conjugated(h);
  const AlgebraElement x = random_algebra(rng, 3);
  const AlgebraElement r = x - torus_project(x, turned);
  for (const auto& b : turned.basis()) EXPECT_NEAR(inner(r, b), 0.0, 1e-13);
}

TEST(Diagonalize, SortedDiagonalInputIsFixed) {
  const double d[] = {0.7, -0.7};
  const AlgebraElement rho = AlgebraElement::imaginary_diagonal(d);
  const Diagonalization dz = diagonalize_skew(rho);
  EXPECT_LT(max_abs(dz.g.matrix() - testing::identity(2)), 1e-15);
  EXPECT_LT(max_abs((dz.tau - rho).matrix()), 1e-15);
}

TEST(Diagonalize, PurePolarization) {
  // D = 0, P = 1: rho = [[0, i], [i, 0]].
  const AlgebraElement rho = testing::su2(0.0, kI);
  const Diagonalization dz = diagonalize_skew(rho);
  EXPECT_NEAR(std::abs(dz.tau(0, 0) - kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(dz.tau(1, 1) + kI), 0.0, 1e-15);
  EXPECT_LT(max_abs((adjoint_conj(dz.g, dz.tau) - rho).matrix()), 1e-12);
}

TEST(Diagonalize, RoundTripRandomConjugates) {
  Rng rng(13);
  for (int n = 2; n <= kMaxDim; ++n) {
    for (int k = 0; k < 50; ++k) {
      std::vector<double> d(static_cast<std::size_t>(n));
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      double sum = 0.0;
      for (auto& v : d) sum += (v = u(rng));
      for (auto& v : d) v -= sum / n;
      std::sort(d.rbegin(), d.rend());
      const AlgebraElement tau0 = AlgebraElement::imaginary_diagonal(d);
      const AlgebraElement rho = adjoint_conj(random_group(rng, n), tau0);
      const Diagonalization dz = diagonalize_skew(rho);
      if (dz.min_gap < 1e-6) continue;
      EXPECT_LT(max_abs((dz.tau - tau0).matrix()), 1e-12);
      EXPECT_LT(max_abs((adjoint_conj(dz.g, dz.tau) - rho).matrix()), 1e-10);
      EXPECT_LT(std::abs(dz.g.matrix().determinant() - 1.0), 1e-12);
    }
  }
}

TEST(Diagonalize, PhaseConventionIsDeterministic) {
  Rng rng(14);
  for (int n = 2; n <= kMaxDim; ++n) {
    const double d[] = {1.5, 0.5, -0.25, -1.75};
    std::vector<double> diag(d, d + n);
    double sum = 0.0;
    for (double v : diag) sum += v;
    for (auto& v : diag) v -= sum / n;
    const AlgebraElement rho =
        adjoint_conj(random_group(rng, n), AlgebraElement::imaginary_diagonal(diag));
    const Diagonalization a = diagonalize_skew(rho);
    const Diagonalization b = diagonalize_skew(rho);
    EXPECT_EQ(max_abs(a.g.matrix() - b.g.matrix()), 0.0);
    // Lead entries were made real and nonnegative before one global phase
    // fixed the determinant, so they all share that phase.
    std::vector<Complex> lead_phase;
    for (int c = 0; c < n; ++c) {
      int lead = 0;
      for (int r = 1; r < n; ++r) {
        if (std::abs(a.g(r, c)) > std::abs(a.g(lead, c))) lead = r;
      }
      lead_phase.push_back(a.g(lead, c) / std::abs(a.g(lead, c)));
    }
    for (int c = 1; c < n; ++c) EXPECT_NEAR(std::abs(lead_phase[c] - lead_phase[0]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.g.matrix().determinant() - 1.0), 0.0, 1e-12);
  }
}

TEST(Diagonalize, ZeroIsDegenerate) {
  const Diagonalization dz = diagonalize_skew(AlgebraElement::zero(2));
  EXPECT_TRUE(dz.degenerate);
  EXPECT_EQ(max_abs(dz.g.matrix() - testing::identity(2)), 0.0);
  EXPECT_EQ(max_abs(dz.tau.matrix()), 0.0);
}

TEST(Diagonalize, NearDegenerateSpectrumFlagged) {
  const double d[] = {1.0, 1.0 - 1e-14, -2.0 + 1e-14};
  const Diagonalization dz = diagonalize_skew(AlgebraElement::imaginary_diagonal(d));
  EXPECT_TRUE(dz.near_degenerate);
  EXPECT_FALSE(dz.degenerate);
}

}  // namespace
}  // namespace mbloch
