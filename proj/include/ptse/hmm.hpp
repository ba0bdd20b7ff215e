#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ptse/types.hpp"
#include "ptse/warnings.hpp"

namespace ptse {

//! Scaled forward/backward recursions.
//!
//! Each forward step is normalized by c_t, the sum of the unscaled forward
//! mass at t; the backward pass reuses the same scale factors. This keeps
//! every intermediate in [0, 1] for arbitrarily long series while leaving
//! gamma and xi unchanged, and gives log-likelihood = sum_t log c_t.
//!
//! Throws DegenerateLikelihood if some row of `likelihoods` is entirely
//! zero (or the forward mass vanishes), ShapeMismatch on dimension
//! disagreement, InvalidArgument for T < 2.
PosteriorTables forward_backward(const EmissionLikelihoodTable& likelihoods,
                                 const TransitionMatrix& transition,
                                 const StateDistribution& initial);

//! M-step transition update: a_ij = sum_t xi_ij(t) / sum_t gamma_i(t),
//! sums over t = 1..T-1. A state whose total gamma mass is below 1e-300
//! gets a uniform row and a "starved-state" warning instead of NaNs.
TransitionMatrix update_transition(const PosteriorTables& posteriors,
                                   WarningLog* warnings = nullptr);

//! M-step initial-distribution update: pi_k = gamma_k(1).
StateDistribution update_initial(const PosteriorTables& posteriors);

//! Fixed-point iteration pi <- pi A until the stationarity residual
//! ||pi A - pi||_inf drops to `tol`, starting from `initial`.
//! Throws NoConvergence (carrying the last iterate and its residual) if
//! `max_iters` steps do not reach the tolerance.
StateDistribution stationary_distribution(const TransitionMatrix& transition,
                                          const StateDistribution& initial,
                                          double tol = 1e-12,
                                          long max_iters = 1000000);

struct DecayPoint {
  long t;
  double distance;
};

//! Frobenius distance ||A^t - 1 pi*||_F for t = 1..t_max. For strictly
//! positive A the sequence decays geometrically at the subdominant
//! eigenvalue rate; tests use it to confirm that.
std::vector<DecayPoint> frobenius_decay(const TransitionMatrix& transition, long t_max);

} // namespace ptse
