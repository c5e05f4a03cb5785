#pragma once

// Reduced Maxwell-Bloch system on the Bloch sphere driven by a sech pulse:
//
//   u1' = -Delta u2,   u2' = Delta u1 + k E(t) u3,   u3' = -k E(t) u2,
//   E(t) = (2 / (k tau_p)) sech(t / tau_p).
//
// Written as rho' = [Omega(t), rho] with rho(u) = [[i u3, u1 + i u2],
// [-u1 + i u2, -i u3]] and Omega(t) = (1/2)[[i Delta, -k E], [k E, -i Delta]].

#include <array>

#include "mbloch/lie.hpp"

namespace mbloch {

struct BlochVector {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  double norm() const;
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

struct DriveParams {
  double delta = 0.0;
  double k = 1.0;
  double tau_p = 1.0;

  void validate() const;
};

double sech_drive(double t, const DriveParams& p);

/// Rotation angle int_{t0}^{t1} k E(s) ds in closed form (Gudermannian).
double pulse_area(double t0, double t1, const DriveParams& p);

BlochVector reduced_rhs(const BlochVector& u, double t, const DriveParams& p);

AlgebraElement bloch_matrix(const BlochVector& u);
/// Inverse of bloch_matrix on its image.
BlochVector read_bloch(const AlgebraElement& rho);
AlgebraElement drive_matrix(double t, const DriveParams& p);

/// [Omega(t), rho(u)].
AlgebraElement commutator_form(const BlochVector& u, double t, const DriveParams& p);

/// -(1/2) Tr(rho(u) Omega(t)) = (Delta u3 - k E(t) u1) / 2. Not conserved.
double reduced_hamiltonian(const BlochVector& u, double t, const DriveParams& p);

struct ReducedState {
  double t = 0.0;
  BlochVector u;
};

/// One RK4 step; `renormalize` rescales |u| back to one afterwards.
ReducedState reduced_step(const ReducedState& s, const DriveParams& p, double dt,
                          bool renormalize = false);

}  // namespace mbloch
