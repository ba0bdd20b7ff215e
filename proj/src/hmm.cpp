#include "ptse/hmm.hpp"

#include <cmath>
#include <string>

#include "ptse/errors.hpp"
#include "ptse/format.hpp"

namespace ptse {

PosteriorTables forward_backward(const EmissionLikelihoodTable& likelihoods,
                                 const TransitionMatrix& transition,
                                 const StateDistribution& initial)
{
  const Eigen::MatrixXd& lik = likelihoods.values;
  const Eigen::MatrixXd& a = transition.entries();
  const Eigen::Index t_len = lik.rows();
  const Eigen::Index k = lik.cols();

  if (t_len < 2) {
    throw InvalidArgument("forward_backward needs at least 2 observations");
  }
  if (a.rows() != k || initial.size() != k) {
    throw ShapeMismatch("likelihood table has " + std::to_string(k) +
                        " states, transition/initial disagree");
  }

  // Scaled forward pass: alpha_hat rows sum to 1, c[t] holds the scale.
  Eigen::MatrixXd alpha(t_len, k);
  Eigen::VectorXd scale(t_len);
  Eigen::RowVectorXd row = initial.probs().transpose().cwiseProduct(lik.row(0));
  scale[0] = row.sum();
  if (!(scale[0] > 0.0)) {
    throw DegenerateLikelihood("all emissions assign zero density to observation 0");
  }
  alpha.row(0) = row / scale[0];
  for (Eigen::Index t = 1; t < t_len; ++t) {
    row = (alpha.row(t - 1) * a).cwiseProduct(lik.row(t));
    scale[t] = row.sum();
    if (!(scale[t] > 0.0)) {
      throw DegenerateLikelihood("all emissions assign zero density to observation " +
                                 std::to_string(t));
    }
    alpha.row(t) = row / scale[t];
  }

  // Backward pass with the same scale factors.
  Eigen::MatrixXd beta(t_len, k);
  beta.row(t_len - 1).setOnes();
  for (Eigen::Index t = t_len - 2; t >= 0; --t) {
    const Eigen::VectorXd weighted =
      lik.row(t + 1).cwiseProduct(beta.row(t + 1)).transpose();
    beta.row(t) = (a * weighted).transpose() / scale[t + 1];
  }

  PosteriorTables out;
  out.gamma = alpha.cwiseProduct(beta);
  out.xi.reserve(static_cast<std::size_t>(t_len - 1));
  for (Eigen::Index t = 0; t + 1 < t_len; ++t) {
    const Eigen::RowVectorXd next = lik.row(t + 1).cwiseProduct(beta.row(t + 1));
    Eigen::MatrixXd x = (alpha.row(t).transpose() * next).cwiseProduct(a) / scale[t + 1];
    out.xi.push_back(std::move(x));
  }
  out.log_likelihood = scale.array().log().sum();
  return out;
}

TransitionMatrix update_transition(const PosteriorTables& posteriors, WarningLog* warnings)
{
  const Eigen::Index t_len = posteriors.gamma.rows();
  const Eigen::Index k = posteriors.gamma.cols();
  if (posteriors.xi.size() != static_cast<std::size_t>(t_len - 1)) {
    throw ShapeMismatch("xi length does not match gamma rows");
  }

  Eigen::MatrixXd numerator = Eigen::MatrixXd::Zero(k, k);
  for (const Eigen::MatrixXd& x : posteriors.xi) {
    numerator += x;
  }
  const Eigen::RowVectorXd denominator = posteriors.gamma.topRows(t_len - 1).colwise().sum();

  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (denominator[i] < 1e-300) {
      // State never visited; a uniform row keeps EM running instead of NaN.
      a.row(i).setConstant(1.0 / static_cast<double>(k));
      warn(warnings, "starved-state",
           "state " + std::to_string(i) +
             " has no posterior mass; its transition row was reset to uniform");
    } else {
      a.row(i) = numerator.row(i) / denominator[i];
    }
  }
  return TransitionMatrix(std::move(a));
}

StateDistribution update_initial(const PosteriorTables& posteriors)
{
  return StateDistribution(posteriors.gamma.row(0));
}

StateDistribution stationary_distribution(const TransitionMatrix& transition,
                                          const StateDistribution& initial,
                                          double tol,
                                          long max_iters)
{
  const Eigen::MatrixXd& a = transition.entries();
  if (initial.size() != transition.size()) {
    throw ShapeMismatch("initial distribution size does not match transition matrix");
  }

  Eigen::RowVectorXd cur = initial.probs().transpose();
  double residual = 0.0;
  for (long it = 0; it < max_iters; ++it) {
    const Eigen::RowVectorXd next = cur * a;
    residual = (next - cur).cwiseAbs().maxCoeff();
    if (residual <= tol) {
      return StateDistribution(cur.transpose());
    }
    cur = next / next.sum();
  }
  throw NoConvergence("stationary distribution did not converge within " +
                        std::to_string(max_iters) + " iterations (residual " +
                        format_double(residual) + "); the chain may be periodic or reducible",
                      cur.transpose(), residual);
}

std::vector<DecayPoint> frobenius_decay(const TransitionMatrix& transition, long t_max)
{
  if (t_max < 1) {
    throw InvalidArgument("t_max must be >= 1");
  }
  const Eigen::Index k = transition.size();
  // The limit needs to be much tighter than the decay floor being measured.
  const StateDistribution pi_star =
    stationary_distribution(transition, StateDistribution::uniform(k), 1e-14);
  const Eigen::MatrixXd limit =
    Eigen::VectorXd::Ones(k) * pi_star.probs().transpose();

  std::vector<DecayPoint> out;
  out.reserve(static_cast<std::size_t>(t_max));
  Eigen::MatrixXd power = transition.entries();
  for (long t = 1; t <= t_max; ++t) {
    out.push_back(DecayPoint{ t, (power - limit).norm() });
    if (t < t_max) {
      power = power * transition.entries();
    }
  }
  return out;
}

} // namespace ptse
