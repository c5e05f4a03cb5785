#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mbloch/random.hpp"
#include "mbloch/reduced_sphere.hpp"
#include "support.hpp"

namespace mbloch {
namespace {

using testing::max_abs;

constexpr double kPi = std::numbers::pi;

BlochVector random_unit(Rng& rng) {
  std::normal_distribution<double> normal;
  BlochVector u{normal(rng), normal(rng), normal(rng)};
  const double r = u.norm();
  return {u.u1 / r, u.u2 / r, u.u3 / r};
}

double field(double t, const DriveParams& p) { return 2.0 / (p.k * p.tau_p) / std::cosh(t / p.tau_p); }

TEST(SechDrive, PeakAndDecay) {
  const DriveParams p{0.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(sech_drive(0.0, p), 1.0);
  double prev = sech_drive(0.0, p);
  for (double t = 0.5; t < 30.0; t += 0.5) {
    const double e = sech_drive(t, p);
    EXPECT_LT(e, prev);
    EXPECT_DOUBLE_EQ(e, sech_drive(-t, p));
    EXPECT_NEAR(e, field(t, p), 1e-15);
    prev = e;
  }
  EXPECT_THROW(sech_drive(0.0, DriveParams{0.0, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(sech_drive(0.0, DriveParams{0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(PulseArea, FullPulseIsTwoPi) {
  for (double k : {0.5, 1.0, 3.0}) {
    for (double tau : {0.5, 1.0, 2.0}) {
      const DriveParams p{0.0, k, tau};
      EXPECT_NEAR(pulse_area(-40.0 * tau, 40.0 * tau, p), 2.0 * kPi, 1e-8);
      EXPECT_NEAR(pulse_area(-40.0 * tau, 0.0, p), kPi, 1e-8);
    }
  }
}

TEST(PulseArea, MatchesQuadrature) {
  const DriveParams p{0.0, 1.5, 0.7};
  const double t0 = -2.0, t1 = 1.3;
  const int n = 20000;
  const double h = (t1 - t0) / n;
  double simpson = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * p.k * field(t0 + i * h, p);
  }
  EXPECT_NEAR(pulse_area(t0, t1, p), simpson * h / 3.0, 1e-12);
}

TEST(ReducedRhs, DetuningPrecession) {
  const DriveParams p{1.0, 1.0, 1.0};
  const BlochVector r = reduced_rhs({0.0, 1.0, 0.0}, 200.0, p);
  EXPECT_NEAR(r.u1, -1.0, 1e-15);
  EXPECT_NEAR(r.u2, 0.0, 1e-15);
  EXPECT_NEAR(r.u3, 0.0, 1e-15);
}

TEST(ReducedRhs, ResonantDriveRotatesU2U3) {
  const DriveParams p{0.0, 2.0, 1.0};
  const BlochVector r = reduced_rhs({0.0, 0.0, -1.0}, 0.0, p);
  EXPECT_NEAR(r.u1, 0.0, 1e-15);
  EXPECT_NEAR(r.u2, -2.0, 1e-15);
  EXPECT_NEAR(r.u3, 0.0, 1e-15);
}

TEST(ReducedRhs, TangentToSphere) {
  Rng rng(21);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const DriveParams p{uni(rng), 1.0 + std::abs(uni(rng)), 0.5 + std::abs(uni(rng))};
    const BlochVector u = random_unit(rng);
    const BlochVector r = reduced_rhs(u, uni(rng), p);
    EXPECT_NEAR(u.u1 * r.u1 + u.u2 * r.u2 + u.u3 * r.u3, 0.0, 1e-14);
  }
}

TEST(CommutatorForm, MatchesVectorField) {
  Rng rng(22);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const DriveParams p{uni(rng), 1.0 + std::abs(uni(rng)), 0.5 + std::abs(uni(rng))};
    const BlochVector u{uni(rng), uni(rng), uni(rng)};
    const double t = uni(rng);
    const Matrix lhs = commutator_form(u, t, p).matrix();
    const Matrix rhs = bloch_matrix(reduced_rhs(u, t, p)).matrix();
    EXPECT_LE(max_abs(lhs - rhs), 1e-12);
    const Matrix direct =
        testing::commutator(drive_matrix(t, p).matrix(), bloch_matrix(u).matrix());
    EXPECT_LE(max_abs(lhs - direct), 1e-12);
  }
}

TEST(BlochMatrix, ReadBackAndSpectrum) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const BlochVector u = random_unit(rng);
    const BlochVector back = read_bloch(bloch_matrix(u));
    EXPECT_NEAR(back.u1, u.u1, 1e-15);
    EXPECT_NEAR(back.u2, u.u2, 1e-15);
    EXPECT_NEAR(back.u3, u.u3, 1e-15);
    // eigenvalues of rho(u) are +-i |u|
    const Matrix r = bloch_matrix(u).matrix();
    EXPECT_NEAR(std::abs(r.determinant() - 1.0), 0.0, 1e-14);
  }
}

TEST(ReducedStep, IsospectralAlongFlow) {
  Rng rng(24);
  const DriveParams p{0.3, 1.0, 1.0};
  ReducedState s{-5.0, random_unit(rng)};
  for (int k = 0; k < 10000; ++k) s = reduced_step(s, p, 1e-3);
  EXPECT_NEAR(s.u.norm(), 1.0, 1e-9);
  EXPECT_NEAR(s.t, 5.0, 1e-10);
}

TEST(ReducedStep, RenormalizeIsExact) {
  Rng rng(25);
  const DriveParams p{0.8, 2.0, 0.5};
  ReducedState s{-3.0, random_unit(rng)};
  for (int k = 0; k < 300; ++k) {
    s = reduced_step(s, p, 0.05, true);
    EXPECT_NEAR(s.u.norm(), 1.0, 1e-14);
  }
}

TEST(ReducedHamiltonian, LinearInDetuning) {
  Rng rng(26);
  for (int i = 0; i < 100; ++i) {
    const BlochVector u = random_unit(rng);
    const DriveParams p0{0.0, 1.3, 0.9};
    const DriveParams p1{1.0, 1.3, 0.9};
    const double t = 0.4;
    EXPECT_NEAR(reduced_hamiltonian(u, t, p1) - reduced_hamiltonian(u, t, p0), 0.5 * u.u3, 1e-15);
    EXPECT_NEAR(reduced_hamiltonian(u, t, p0), -0.5 * p0.k * field(t, p0) * u.u1, 1e-15);
  }
}

TEST(ReducedStep, ResonantRotationClosedForm) {
  const DriveParams p{0.0, 1.0, 1.0};
  const double t0 = -20.0;
  ReducedState s{t0, {0.0, 0.0, -1.0}};
  const double dt = 1e-3;
  int checked = 0;
  for (int k = 1; k <= 40000; ++k) {
    s = reduced_step(s, p, dt);
    if (k % 4000 == 0) {
      const double theta = pulse_area(t0, s.t, p);
      EXPECT_NEAR(s.u.u1, 0.0, 1e-15);
      EXPECT_NEAR(s.u.u2, -std::sin(theta), 1e-7) << "t = " << s.t;
      EXPECT_NEAR(s.u.u3, -std::cos(theta), 1e-7) << "t = " << s.t;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 10);
  // a 2 pi pulse returns the ground state
  EXPECT_NEAR(s.u.u3, -1.0, 1e-7);
}

}  // namespace
}  // namespace mbloch
