#pragma once

// Time evolution of the generalized Maxwell-Bloch chain
//
//   (g_t g^-1)_t + c (g_t g^-1)_x = [sigma, Ad_g tau(x)],
//
// in first-order form g_t = m g, m_t = -c m_x + [sigma, Ad_g tau], together
// with the scalar (E, P, D) field system it is equivalent to for SU(2), the
// spatially constant C. Neumann limit and the SO(2) sine-Gordon embedding.

#include <cstdint>
#include <utility>
#include <vector>

#include "mbloch/lie.hpp"
#include "mbloch/loop_grid.hpp"

namespace mbloch {

struct ModelParams {
  int n = 2;
  AlgebraElement sigma;
  LoopField<AlgebraElement> tau;
  double c = 1.0;
  TorusFrame tau_frame;
  TorusFrame sigma_frame;

  const PeriodicGrid& grid() const { return tau.grid; }
  bool tau_is_constant(double tol = 0.0) const;
  /// Checks sigma != 0, dimensions, and (when `need_torus_tau`) that tau is
  /// constant in x and lies in the tau frame.
  void validate(bool need_torus_tau = false) const;
};

/// sigma = (i/2) diag(n-1, n-3, ..., 1-n); for n = 2 this is diag(i,-i)/2.
AlgebraElement default_sigma(int n);

struct ChainState {
  double t = 0.0;
  std::int64_t step = 0;
  LoopField<GroupElement> g;
  LoopField<AlgebraElement> m;  // right-trivialized velocity g_t g^-1

  const PeriodicGrid& grid() const { return g.grid; }
};

struct StepControl {
  double dt = 1e-2;
  double cfl = 0.25;
  int reunit_every = 1;
  DerivOrder deriv_order = DerivOrder::kFourth;
};

struct ChainTangent {
  std::vector<Matrix> g_dot;
  std::vector<AlgebraElement> m_dot;
};

/// [sigma, g tau g^dagger] for a (possibly slightly non-unitary) g.
Matrix potential_force(const Matrix& sigma, const Matrix& g, const Matrix& tau);

ChainTangent chain_rhs(const ChainState& s, const ModelParams& p, const StepControl& ctl);

/// Classical RK4 on (g, m), then reunitarization of every g_j when the new
/// step count is a multiple of ctl.reunit_every. Throws NumericalBlowup on
/// non-finite values or a failed reunitarization.
ChainState rk4_step(const ChainState& s, const ModelParams& p, const StepControl& ctl);

/// min(cfl dx / max(|c|, 1e-12), cfl / (1 + 2 |sigma| max_j |tau_j|)).
double cfl_dt(const ModelParams& p, const PeriodicGrid& grid, double cfl);

/// Largest dt <= dt_max that divides the horizon into an integer number of steps.
double fit_step(double horizon, double dt_max);

// ---------------------------------------------------------------------------
// Scalar field form (SU(2) only)

enum class BetaMode { kSkew, kDamping };

struct FieldState {
  double t = 0.0;
  LoopField<Complex> E;
  LoopField<Complex> P;
  LoopField<double> D;
  double beta = 0.0;
  BetaMode beta_mode = BetaMode::kSkew;

  const PeriodicGrid& grid() const { return E.grid; }
};

struct FieldTangent {
  std::vector<Complex> E_t;
  std::vector<Complex> P_t;
  std::vector<double> D_t;
};

/// E_t = -c E_x + 2P,  P_t = E D - i beta P (skew) or E D - beta P (damping),
/// D_t = -(conj(E) P + E conj(P)) / 2.
FieldTangent fields_rhs(const FieldState& f, const ModelParams& p, DerivOrder order);

FieldState fields_step(const FieldState& f, const ModelParams& p, double dt, DerivOrder order);

/// rho(D, P) = [[iD, iP], [i conj(P), -iD]].
AlgebraElement rho_from_fields(Complex P, double D);
/// F(E, beta) = [[i beta, E], [-conj(E), -i beta]] / 2.
AlgebraElement f_from_fields(Complex E, double beta);

class DegeneratePointError : public std::domain_error {
 public:
  DegeneratePointError(const std::string& what, int index)
      : std::domain_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

struct GroupForm {
  ChainState state;
  ModelParams params;
};

/// rho_j = Ad_{g_j} tau_j and m_j = -F_j. `base` supplies c and the frames;
/// sigma is replaced by diag(i,-i)/2 and tau by the diagonalized rho.
GroupForm init_from_fields(const FieldState& f, ModelParams base);

struct ExtractedFields {
  FieldState fields;
  double beta_max_dev = 0.0;
};

ExtractedFields extract_fields(const ChainState& s, const ModelParams& p);

// ---------------------------------------------------------------------------
// C. Neumann oscillator (spatially constant limit)

struct NeumannState {
  double t = 0.0;
  GroupElement g;
  AlgebraElement m;
};

struct NeumannParams {
  AlgebraElement sigma;
  AlgebraElement tau;
};

/// Takes tau_0 from a chain model; throws when tau varies in x.
NeumannParams neumann_params(const ModelParams& p);

std::pair<Matrix, AlgebraElement> neumann_rhs(const NeumannState& s, const NeumannParams& p);
NeumannState neumann_step(const NeumannState& s, const NeumannParams& p, double dt);
/// H = inner(m, m) / 2 + inner(sigma, Ad_g tau).
double neumann_energy(const NeumannState& s, const NeumannParams& p);

// ---------------------------------------------------------------------------
// Sine-Gordon embedding into SO(2) c SU(2)

/// [sigma, Ad_{exp(phi J)} sigma] = kSineGordonCoupling * sin(2 phi) * J for
/// sigma = diag(i,-i)/2, hence phi_tt + c phi_tx = (1/2) sin(2 phi).
inline constexpr double kSineGordonCoupling = 0.5;

/// J = [[0, 1], [-1, 0]].
AlgebraElement rotation_generator();

/// sigma = tau = diag(i,-i)/2 on `grid` with speed c.
ModelParams sine_gordon_params(const PeriodicGrid& grid, double c);

ChainState sine_gordon_embed(const LoopField<double>& phi, const LoopField<double>& phi_t);

struct SineGordonFields {
  LoopField<double> phi;
  LoopField<double> phi_t;
};

/// Throws InvariantError when the state is more than 1e-6 off SO(2).
SineGordonFields sine_gordon_extract(const ChainState& s);

/// Max over nodes of the distance of (g_j, m_j) from SO(2) x span{J}.
double off_subgroup_defect(const ChainState& s);

}  // namespace mbloch
