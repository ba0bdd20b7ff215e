#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ptse {

//! Aligned target series and per-member quantile predictions over a
//! training window. Column k of `member_predictions` holds member k's
//! q-th-quantile forecast for each time step.
struct TimeSeriesFrame {
  //! Validates: >= 2 rows, strictly increasing timestamps, finite cells
  //! (MissingData on NaN), q in (0, 1), unique nonempty member names.
  TimeSeriesFrame(std::vector<std::string> timestamps_in,
                  Eigen::VectorXd targets_in,
                  Eigen::MatrixXd member_predictions_in,
                  double q_in,
                  std::vector<std::string> member_names_in);

  Eigen::Index length() const { return targets.size(); }
  Eigen::Index members() const { return member_predictions.cols(); }

  std::vector<std::string> timestamps;
  Eigen::VectorXd targets;
  Eigen::MatrixXd member_predictions;
  double q;
  std::vector<std::string> member_names;
};

} // namespace ptse
