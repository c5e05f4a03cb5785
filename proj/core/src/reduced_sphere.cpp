#include "mbloch/reduced_sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace mbloch {
namespace {

constexpr Complex kI{0.0, 1.0};

double gudermannian(double x) { return std::atan(std::sinh(x)); }

}  // namespace

double BlochVector::norm() const { return std::sqrt(u1 * u1 + u2 * u2 + u3 * u3); }

void DriveParams::validate() const {
  if (k == 0.0) throw std::invalid_argument("drive coupling k must be nonzero");
  if (!(tau_p > 0.0)) throw std::invalid_argument("pulse width tau_p must be positive");
}

double sech_drive(double t, const DriveParams& p) {
  p.validate();
  return 2.0 / (p.k * p.tau_p) / std::cosh(t / p.tau_p);
}

double pulse_area(double t0, double t1, const DriveParams& p) {
  p.validate();
  return 2.0 * (gudermannian(t1 / p.tau_p) - gudermannian(t0 / p.tau_p));
}

BlochVector reduced_rhs(const BlochVector& u, double t, const DriveParams& p) {
  const double ke = p.k * sech_drive(t, p);
  return {-p.delta * u.u2, p.delta * u.u1 + ke * u.u3, -ke * u.u2};
}

AlgebraElement bloch_matrix(const BlochVector& u) {
  Matrix r(2, 2);
  r << kI * u.u3, Complex(u.u1, u.u2), Complex(-u.u1, u.u2), -kI * u.u3;
  return AlgebraElement::unchecked(r);
}

BlochVector read_bloch(const AlgebraElement& rho) {
  if (rho.dim() != 2) throw DimensionError("read_bloch: n must be 2");
  return {rho(0, 1).real(), rho(0, 1).imag(), rho(0, 0).imag()};
}

AlgebraElement drive_matrix(double t, const DriveParams& p) {
  // The off-diagonal coupling enters as -k E so that [Omega, rho] reproduces
  // the component equations with the sign of k used there.
  const double ke = p.k * sech_drive(t, p);
  Matrix o(2, 2);
  o << 0.5 * kI * p.delta, -0.5 * ke, 0.5 * ke, -0.5 * kI * p.delta;
  return AlgebraElement::unchecked(o);
}

AlgebraElement commutator_form(const BlochVector& u, double t, const DriveParams& p) {
  return bracket(drive_matrix(t, p), bloch_matrix(u));
}

double reduced_hamiltonian(const BlochVector& u, double t, const DriveParams& p) {
  return 0.5 * inner(bloch_matrix(u), drive_matrix(t, p));
}

ReducedState reduced_step(const ReducedState& s, const DriveParams& p, double dt,
                          bool renormalize) {
  if (!(dt > 0.0)) throw std::invalid_argument("reduced_step: dt must be positive");
  auto add = [](const BlochVector& a, const BlochVector& b, double h) {
    return BlochVector{a.u1 + h * b.u1, a.u2 + h * b.u2, a.u3 + h * b.u3};
  };
  const BlochVector k1 = reduced_rhs(s.u, s.t, p);
  const BlochVector k2 = reduced_rhs(add(s.u, k1, 0.5 * dt), s.t + 0.5 * dt, p);
  const BlochVector k3 = reduced_rhs(add(s.u, k2, 0.5 * dt), s.t + 0.5 * dt, p);
  const BlochVector k4 = reduced_rhs(add(s.u, k3, dt), s.t + dt, p);
  const double w = dt / 6.0;
  ReducedState out;
  out.t = s.t + dt;
  out.u = {s.u.u1 + w * (k1.u1 + 2.0 * k2.u1 + 2.0 * k3.u1 + k4.u1),
           s.u.u2 + w * (k1.u2 + 2.0 * k2.u2 + 2.0 * k3.u2 + k4.u2),
           s.u.u3 + w * (k1.u3 + 2.0 * k2.u3 + 2.0 * k3.u3 + k4.u3)};
  if (!std::isfinite(out.u.u1) || !std::isfinite(out.u.u2) || !std::isfinite(out.u.u3)) {
    throw NumericalBlowup("reduced_step: non-finite state", s.t);
  }
  if (renormalize) {
    const double r = out.u.norm();
    out.u = {out.u.u1 / r, out.u.u2 / r, out.u.u3 / r};
  }
  return out;
}

}  // namespace mbloch
