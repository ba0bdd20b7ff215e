#include "ptse/types.hpp"

#include <cmath>
#include <string>

namespace ptse {

namespace {

constexpr double kStochasticTol = 1e-12;

} // namespace

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries)
  : entries_(std::move(entries))
{
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw InvalidArgument("transition matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double a = entries_(i, j);
      if (!std::isfinite(a) || a < 0.0) {
        throw InvalidArgument("transition matrix entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is negative or non-finite");
      }
      row_sum += a;
    }
    if (std::abs(row_sum - 1.0) > kStochasticTol) {
      throw InvalidArgument("transition matrix row " + std::to_string(i) +
                            " sums to " + std::to_string(row_sum) + ", not 1");
    }
  }
}

TransitionMatrix TransitionMatrix::uniform(Eigen::Index k)
{
  return TransitionMatrix(Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k)));
}

StateDistribution::StateDistribution(Eigen::VectorXd probs)
  : probs_(std::move(probs))
{
  if (probs_.size() < 1) {
    throw InvalidArgument("state distribution must be nonempty");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidArgument("state probability " + std::to_string(i) +
                            " is negative or non-finite");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kStochasticTol) {
    throw InvalidArgument("state distribution sums to " + std::to_string(total) + ", not 1");
  }
}

StateDistribution StateDistribution::uniform(Eigen::Index k)
{
  return StateDistribution(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
}

EmissionLikelihoodTable::EmissionLikelihoodTable(Eigen::MatrixXd v)
  : values(std::move(v))
{
  if (values.rows() < 1 || values.cols() < 1) {
    throw InvalidArgument("likelihood table must be nonempty");
  }
  if (!values.allFinite() || (values.array() < 0.0).any()) {
    throw InvalidArgument("likelihood table has negative or non-finite entries");
  }
}

} // namespace ptse
