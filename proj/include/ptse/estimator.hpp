#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptse/mqe.hpp"
#include "ptse/time_series.hpp"
#include "ptse/types.hpp"
#include "ptse/warnings.hpp"

namespace ptse {

//! Candidate-bandwidth grid specification: `count` log-spaced values in
//! [pilot * lo_factor, pilot * hi_factor] around the Silverman pilot.
struct CandidateGrid {
  int count = 16;
  double lo_factor = 0.125;
  double hi_factor = 8.0;
};

struct FitConfig {
  int max_iters = 100;
  double loglik_tol = 1e-6;  // nats
  double param_tol = 1e-5;   // max abs change across A, pi, sigma_k
  CandidateGrid bandwidth_candidates;
  int bootstrap_b = 20;
  std::uint64_t seed = 0;
  double pi_star_tol = 1e-12;
  //! Re-run bandwidth selection only for the first `bandwidth_freeze_after`
  //! M steps; later steps reuse the last selected sigma_k.
  int bandwidth_freeze_after = std::numeric_limits<int>::max();
  //! Test mode: keep the initial emissions fixed and update only A and pi,
  //! which restores the classic EM monotonicity guarantee.
  bool freeze_emissions = false;

  void validate() const;
};

//! Fitted ensemble: transition matrix, initial and stationary state
//! distributions, and one constrained residual density per member.
struct EnsembleModel {
  TransitionMatrix transition;
  StateDistribution initial;
  StateDistribution stationary;
  std::vector<MqeEmission> emissions;
  double q;
  std::vector<std::string> member_names;
  std::vector<double> fit_trace; // log-likelihood at each E step
  bool converged = true;
  int iterations = 0;
  long floored_likelihoods = 0;
};

//! MQE Baum-Welch driver.
//!
//! Starts from uniform A and pi with plain constrained KDE emissions
//! (uniform weights, Silverman pilot bandwidth), then alternates
//!   E: scaled forward/backward on the current emission likelihood table,
//!   M: transition/initial updates, then per member a bootstrap bandwidth
//!      selection on the gamma-weighted residuals and a fresh side-constant
//!      solve,
//! until the log-likelihood moves less than `loglik_tol` and no parameter
//! moves more than `param_tol`, or `max_iters` E steps have run. The
//! returned parameters are the ones the final trace entry was computed at,
//! so loglik(series, model) reproduces fit_trace.back(). When the cap is
//! hit, the best iterate by log-likelihood is returned and the model is
//! flagged `converged = false` with a "no-convergence" warning.
//!
//! Deterministic given config.seed: per-member bootstrap streams are keyed
//! by (seed, iteration, member name), which also makes the fit equivariant
//! under permutations of the member columns.
//!
//! Emission likelihoods are floored at 1e-300 before each E step; the
//! number of floored entries is reported on the model and as a warning.
//! Throws NonFiniteLikelihood if an emission evaluates to NaN/Inf.
EnsembleModel fit(const TimeSeriesFrame& series,
                  const FitConfig& config,
                  WarningLog* warnings = nullptr);

//! Scaled-forward log-likelihood of `series` under `model` (same 1e-300
//! likelihood floor as fit). Throws ShapeMismatch when member count or
//! quantile level disagree.
double loglik(const TimeSeriesFrame& series, const EnsembleModel& model);

//! Serialize to a versioned JSON document. Reals survive a round trip
//! bit-exactly; deserialize(serialize(m)) reproduces every field.
std::string serialize(const EnsembleModel& model);

//! Parse a model document. Throws SchemaVersionMismatch for an unknown
//! schema/version, MalformedDocument for anything structurally wrong.
EnsembleModel deserialize(const std::string& document);

} // namespace ptse
