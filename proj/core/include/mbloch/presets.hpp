#pragma once

// Initial-condition presets. Every preset reads optional overrides from
// RunConfig::preset_params and is a deterministic function of (config, grid).
//
//   torus_flow       g = I, m = mu constant in the diagonal torus, tau = sigma
//                    params: mu (diagonal-frame coefficients, default [0.7, 0.2, ...]),
//                            tau (default: sigma)
//   random_smooth    g = exp(X(x)), m = Y(x) band-limited seeded loops, tau constant diagonal
//                    params: modes (3), gAmp (1.0), mAmp (0.5), tau ([0.8, 0.3, ...])
//   neumann_generic  seeded constant g, m; tau constant diagonal
//                    params: mScale (0.5), tau
//   fields_gaussian  smooth periodic bumps in E, P and D = -1 + bump (SU(2))
//                    params: eAmp (0.5), pAmp (0.3), dAmp (0.2), width (4.0)
//   sg_kink          phi = amp sin x + wind x, phi_t = vel cos x
//                    params: amp (0.5), wind (0), vel (0.2)
//   sit_pulse        reduced sphere, u(-20 tau_p) = (0, 0, -1) over 40 tau_p
//                    params: delta (0), k (1), tauP (1), u0 ([0, 0, -1]), dt (tauP / 1000)

#include "mbloch/config.hpp"
#include "mbloch/diagnostics.hpp"
#include "mbloch/dynamics.hpp"
#include "mbloch/reduced_sphere.hpp"

namespace mbloch {

struct ChainSetup {
  ChainState state;
  ModelParams params;
};

/// Group-form initial data for the chain and neumann modes.
ChainSetup make_chain_setup(const RunConfig& cfg, const PeriodicGrid& grid);

/// fields_gaussian data with beta and betaMode from the config.
FieldState make_field_state(const RunConfig& cfg, const PeriodicGrid& grid);

struct SineGordonSetup {
  LoopField<double> phi;
  LoopField<double> phi_t;
};
SineGordonSetup make_sine_gordon(const RunConfig& cfg, const PeriodicGrid& grid);

struct ReducedSetup {
  ReducedState state;
  DriveParams drive;
  double dt = 1e-3;
};
ReducedSetup make_reduced_setup(const RunConfig& cfg);

/// Probes resolved against a model: seeded xi loops in the tau torus (only
/// when tau is constant), chi nodes snapped to the grid, etas in the sigma
/// torus. The xi loops depend on the seed but not on the grid resolution.
DiagnosticProbes make_probes(const RunConfig& cfg, const ModelParams& p);

/// Node index nearest to x on the periodic grid.
int nearest_node(const PeriodicGrid& grid, double x);

}  // namespace mbloch
