#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ptse/errors.hpp"

namespace ptse {

//! Row-stochastic matrix of the hidden optimal-model process.
//! Entry (i, j) is the probability of moving from state i to state j.
class TransitionMatrix {
public:
  //! Validates shape, nonnegativity and row sums (1 within 1e-12).
  explicit TransitionMatrix(Eigen::MatrixXd entries);

  static TransitionMatrix uniform(Eigen::Index k);

  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }

private:
  Eigen::MatrixXd entries_;
};

//! Probability vector over the K hidden states.
class StateDistribution {
public:
  //! Validates nonnegativity and total mass (1 within 1e-12).
  explicit StateDistribution(Eigen::VectorXd probs);

  static StateDistribution uniform(Eigen::Index k);

  const Eigen::VectorXd& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }

private:
  Eigen::VectorXd probs_;
};

//! T x K table of per-observation emission densities; entry (t, k) is the
//! density member k assigns to the observation at time t.
struct EmissionLikelihoodTable {
  explicit EmissionLikelihoodTable(Eigen::MatrixXd v);

  Eigen::MatrixXd values;
};

//! Posterior state and transition probabilities from one E step.
//! gamma(t, k) is the probability of state k at time t; xi[t](i, j) the
//! probability of the i -> j transition between t and t+1 (t = 0..T-2).
struct PosteriorTables {
  Eigen::MatrixXd gamma;
  std::vector<Eigen::MatrixXd> xi;
  double log_likelihood = 0.0;
};

} // namespace ptse
