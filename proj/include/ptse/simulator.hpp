#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ptse/types.hpp"

namespace ptse {

//! Synthetic HMM specification. An empty `transition` means "draw a
//! uniform-random row-normalized matrix from the seed"; empty means/stddevs
//! default to mean_k = 0.2 k and stddev_k = sqrt(k) + 1 for k = 1..K.
//! (Whether that reads the literature's N(0.2k, sqrt(k)+1) as a stddev or a
//! variance is the caller's choice; pass explicit stddevs for the other
//! reading.)
struct SimConfig {
  Eigen::Index states = 3;
  Eigen::Index length = 1000;
  std::optional<TransitionMatrix> transition;
  Eigen::VectorXd means;   // empty -> defaults
  Eigen::VectorXd stddevs; // empty -> defaults
  int replications = 100;
  double tau = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  //! Copy with transition/means/stddevs materialized.
  SimConfig resolved() const;
};

//! Entries i.i.d. uniform(0,1), rows normalized; strictly positive and
//! deterministic per seed.
TransitionMatrix random_transition_matrix(Eigen::Index k, std::uint64_t seed);

struct HmmSample {
  Eigen::VectorXi states; // 0-based state indices
  Eigen::VectorXd observations;
};

//! Draws a state path from (initial, A) and Gaussian observations
//! O_t ~ N(mean_{S_t}, stddev_{S_t}); deterministic per config.seed.
HmmSample sample_hmm(const SimConfig& config, const StateDistribution& initial);

//! Running empirical-CDF trajectories across replications, against the
//! stationary-mixture limit L(tau) = sum_k pi*_k Phi((tau - mean_k) / sd_k).
struct ConvergenceReport {
  SimConfig config; // resolved echo
  double limit = 0.0;
  Eigen::MatrixXd trajectories;    // replications x T, F_t(tau) per step
  Eigen::VectorXd mean_trajectory; // across replications
  Eigen::VectorXd band_lo;         // pointwise 2.5% quantile
  Eigen::VectorXd band_hi;         // pointwise 97.5% quantile

  //! Mean over replications of |F_T(tau) - limit| at the final step.
  double mean_terminal_gap() const;
};

//! One trajectory per replication, each with a fresh random initial
//! distribution (normalized i.i.d. exponentials — uniform on the simplex).
//! Replication r uses the stream mix_seed(seed, r), so parallel and
//! sequential evaluation orders would agree bit-for-bit.
ConvergenceReport run_convergence_experiment(const SimConfig& config);

//! Plot-ready CSV with columns (replication, t, empirical_cdf), plus a
//! sidecar document `<csv_path>.meta.json` carrying the limit, the config
//! echo and the seed.
void write_convergence_csv(const ConvergenceReport& report, const std::string& csv_path);

} // namespace ptse
