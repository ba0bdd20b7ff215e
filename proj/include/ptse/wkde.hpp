#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ptse/warnings.hpp"

namespace ptse {

//! Observations with strictly positive sample weights.
struct WeightedSample {
  WeightedSample(Eigen::VectorXd values_in, Eigen::VectorXd weights_in);

  Eigen::VectorXd values;
  Eigen::VectorXd weights;
};

//! Gaussian-kernel weighted KDE.
struct KdeModel {
  KdeModel(WeightedSample sample_in, double bandwidth_in);

  WeightedSample sample;
  double bandwidth;
};

//! Density (1 / (sigma * sum w)) * sum_t w_t phi((y - y_t) / sigma).
double kde_pdf(const KdeModel& model, double y);

//! Analytic CDF (1 / sum w) * sum_t w_t Phi((y - y_t) / sigma).
double kde_cdf(const KdeModel& model, double y);

//! kde_pdf evaluated at every grid point (vectorized inner sum).
Eigen::VectorXd kde_pdf_grid(const Eigen::VectorXd& values,
                             const Eigen::VectorXd& weights,
                             double bandwidth,
                             const Eigen::VectorXd& grid);

//! Silverman's rule on a weighted sample: 1.06 * s_w * N_eff^(-1/5) with
//! the weighted standard deviation s_w and effective sample size
//! N_eff = (sum w)^2 / sum w^2. Returns 0 when the sample has no spread.
double silverman_bandwidth(const WeightedSample& sample);

//! Log-spaced candidate grid around a pilot bandwidth.
Eigen::VectorXd default_bandwidth_candidates(double pilot,
                                             int count = 16,
                                             double lo_factor = 0.125,
                                             double hi_factor = 8.0);

struct BandwidthSelection {
  double sigma_star = 0.0;
  double pilot = 0.0;
  Eigen::VectorXd scores; // per-candidate bootstrap integrated MSE
};

//! Bootstrap bandwidth selection.
//!
//! Draws `bootstrap_b` smoothed resamples of size N from the pilot KDE
//! (index drawn proportionally to the sample weights, plus Gaussian noise
//! at the pilot bandwidth), scores every candidate by the trapezoid-rule
//! integral of the squared deviation from the pilot density on a fixed
//! 512-point grid, and returns the argmin candidate with all scores.
//! Resamples are generated up front from `rng_seed`, so the result is a
//! pure function of (sample, candidates, bootstrap_b, rng_seed).
//!
//! An all-identical sample cannot be scored; it yields the smallest
//! candidate plus a "degenerate-sample" warning. Throws EmptyCandidates,
//! or InvalidArgument for unsorted/nonpositive candidates, B < 1 or N < 2.
BandwidthSelection select_bandwidth(const WeightedSample& sample,
                                    const Eigen::VectorXd& candidates,
                                    int bootstrap_b,
                                    std::uint64_t rng_seed,
                                    WarningLog* warnings = nullptr);

} // namespace ptse
