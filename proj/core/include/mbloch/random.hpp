#pragma once

// Seeded random elements and band-limited random loops.

#include <cstdint>
#include <random>

#include "mbloch/lie.hpp"
#include "mbloch/loop_grid.hpp"

namespace mbloch {

using Rng = std::mt19937_64;

/// Gaussian entries projected to su(n), rescaled to norm `scale`.
AlgebraElement random_algebra(Rng& rng, int n, double scale = 1.0);
/// exp of a random algebra element of norm up to pi * sqrt(2).
GroupElement random_group(Rng& rng, int n);

/// sum_{k=0}^{modes} A_k cos(kx) + B_k sin(kx) with random algebra
/// coefficients of norm ~ 1/(1+k)^2, scaled so the coefficient norms sum to
/// `amplitude` (so max_j |X_j| <= amplitude). The loop is the same continuous
/// function for every grid, which keeps refinement studies consistent.
LoopField<AlgebraElement> random_smooth_loop(Rng& rng, const PeriodicGrid& grid, int n,
                                             int modes, double amplitude);

/// Real trigonometric polynomial, coefficient magnitudes summing to `amplitude`.
LoopField<double> random_smooth_scalar(Rng& rng, const PeriodicGrid& grid, int modes,
                                       double amplitude);

}  // namespace mbloch
