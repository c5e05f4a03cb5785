#pragma once

// Conserved and monitored quantities of a chain state.

#include <array>
#include <vector>

#include "mbloch/dynamics.hpp"

namespace mbloch {

/// Coefficient of c * g_x g^-1 in the loop-torus charges. The density
/// <g^-1 g_t + c g^-1 g_x, xi> is the one the chain equation conserves:
/// (g^-1 g_t + c g^-1 g_x)_t = [Ad_{g^-1} sigma, tau] has no component
/// along the torus of tau.
inline constexpr double kConservedMagneticCoefficient = 1.0;
/// The coefficient -1/2 as it appears in the moment-map formula. Kept for
/// comparison; it is only conserved when c = 0.
inline constexpr double kLiteralMagneticCoefficient = -0.5;

/// integral of inner(m, m)/2 + inner(sigma, Ad_g tau).
double energy_total(const ChainState& s, const ModelParams& p);

/// Loop-torus charge
///   G_xi = integral of inner(m + a c g_x g^-1, Ad_g xi) dx
/// with a = `magnetic_coefficient` and g_x from the centered difference of
/// the given order. Requires tau constant and every xi_j in the tau torus.
double noether_G(const ChainState& s, const ModelParams& p, const LoopField<AlgebraElement>& xi,
                 DerivOrder order,
                 double magnetic_coefficient = kConservedMagneticCoefficient);

/// Pointwise charge in left-trivialized form,
///   inner(g^dagger m g + a c g^dagger g_x, xi_hat)  at node x0_index.
double pointwise_chi(const ChainState& s, const ModelParams& p, int x0_index,
                     const AlgebraElement& xi_hat, DerivOrder order,
                     double magnetic_coefficient = kConservedMagneticCoefficient);

/// Same charge in right-trivialized form, inner(m + a c g_x g^dagger, Ad_g xi_hat).
double pointwise_chi_right(const ChainState& s, const ModelParams& p, int x0_index,
                           const AlgebraElement& xi_hat, DerivOrder order,
                           double magnetic_coefficient = kConservedMagneticCoefficient);

/// Projection of (g^-1 g_t + a c g^-1 g_x)(x0) onto the tau torus.
AlgebraElement pointwise_chi_element(const ChainState& s, const ModelParams& p, int x0_index,
                                     DerivOrder order,
                                     double magnetic_coefficient = kConservedMagneticCoefficient);

/// integral of inner(m, eta) for constant eta in the sigma torus.
double left_moment_J(const ChainState& s, const ModelParams& p, const AlgebraElement& eta);
/// Sigma-torus projection of the integral of m.
AlgebraElement left_moment_element(const ChainState& s, const ModelParams& p);

struct BetaValue {
  double mean = 0.0;
  double max_dev = 0.0;
};

/// Per node 2 Tr(m sigma) = -2 inner(m, sigma); equals beta for m = -F.
BetaValue beta_value(const ChainState& s, const ModelParams& p);

/// Per node | |Ad_g tau| - |tau| |.
LoopField<double> casimir_profile(const ChainState& s, const ModelParams& p);

/// Max over nodes of ||g^dagger g - I||_F.
double unitarity_dev(const ChainState& s);

/// Zero-curvature residual V_t - c U_x + [U, V] with
///   U = z sigma - m,  V = -z sigma + m - Ad_g tau / z,
/// V_t from the two snapshots, everything else at the averaged midpoint.
/// Returns the max over nodes of the Frobenius norm. (At c = 1 this is the
/// textbook V_t - U_x + [U, V].)
double lax_residual(const ChainState& prev, const ChainState& next, const ModelParams& p,
                    double z, DerivOrder order);

/// Sorted eigenvalues of the quadratic form q -> -Tr(sigma g(q) tau g(q)^dagger)
/// on R^4, sigma = diag(i,-i) and g(q) = [[q1 + i q2, q3 + i q4],
/// [-q3 + i q4, q1 - i q2]]; assembled by polarization sampling.
std::array<double, 4> potential_spectrum(const AlgebraElement& tau);

/// The displayed coefficient form 2a(q1^2+q2^2-q3^2-q4^2) + 4b(-q1 q4 + q2 q3)
/// + 4c(q1 q3 + q2 q4) for tau = [[ia, b+ic], [-b+ic, -ia]].
double potential_closed_form(double a, double b, double c, const std::array<double, 4>& q);

/// Per-run choice of what to monitor.
struct DiagnosticProbes {
  std::vector<LoopField<AlgebraElement>> xi_loops;  // G
  std::vector<int> chi_nodes;                       // chi, paired with chi_xi
  std::vector<AlgebraElement> chi_xi;
  std::vector<AlgebraElement> etas;                 // J
  std::vector<double> z_values{0.5, 1.0, 2.0};      // lax
};

struct DiagnosticRecord {
  double t = 0.0;
  double energy = 0.0;
  double beta_mean = 0.0;
  double beta_dev = 0.0;
  double casimir_dev = 0.0;
  double unitarity_dev = 0.0;
  std::vector<double> G;
  std::vector<double> chi;
  std::vector<double> J;
  std::vector<double> lax;  // empty when no previous snapshot was given
};

/// Charges (G, chi) are only evaluated when tau is constant in x.
DiagnosticRecord record_diagnostics(const ChainState* prev, const ChainState& cur,
                                    const ModelParams& p, const DiagnosticProbes& probes,
                                    DerivOrder order);

}  // namespace mbloch
