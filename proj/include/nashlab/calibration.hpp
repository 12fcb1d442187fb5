#pragma once

#include <cmath>

#include "nashlab/profile.hpp"

// Regression bounds frozen from the n=6 desk calibration run (instance seed 1,
// code seed 7). Measured values are noted next to each bound; only loosen one
// together with a ledger entry explaining the change.
namespace nashlab::calibration {

// empirical ||g(x)-g(y)|| / ||x-y||, measured 0.30 on random pairs, 0.75 once boundary pairs are mixed in
inline constexpr double kLipschitzBound = 1.0;

// min ||g|| / delta away from endpoints, measured 0.447
inline constexpr double kDisplacementC1 = 0.4;

// doubly-local vs global f_i, scale 10 sqrt(eps_B); worst measured 1.1e-5
inline double doubly_local_tolerance(const ConstantsProfile& p) {
  return 10.0 * std::sqrt(p.eps_brouwer);
}

// output change / input perturbation, measured p95 0.95, max 1.02
inline constexpr double kDoublyLocalC = 2.0;

// max planted regret, measured 2.8e-17; must never increase
inline constexpr double kPlantEpsilon = 1e-15;

// residual^2 <= K eps_B at the planted profile, measured 3.2e-26 (ratio 3e-15)
inline constexpr double kResidualK = 1.0;

// accuracy frequency for the doubly-local checks
inline constexpr double kLocalFrequency = 0.95;

// fixed-point search target
inline constexpr double kFixedPointResidual = 1e-8;

}  // namespace nashlab::calibration
