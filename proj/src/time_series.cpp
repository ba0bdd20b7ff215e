#include "ptse/time_series.hpp"

#include <cmath>
#include <set>
#include <string>

#include "ptse/errors.hpp"

namespace ptse {

TimeSeriesFrame::TimeSeriesFrame(std::vector<std::string> timestamps_in,
                                 Eigen::VectorXd targets_in,
                                 Eigen::MatrixXd member_predictions_in,
                                 double q_in,
                                 std::vector<std::string> member_names_in)
  : timestamps(std::move(timestamps_in))
  , targets(std::move(targets_in))
  , member_predictions(std::move(member_predictions_in))
  , q(q_in)
  , member_names(std::move(member_names_in))
{
  const Eigen::Index t_len = targets.size();
  const Eigen::Index k = member_predictions.cols();
  if (t_len < 2) {
    throw InvalidArgument("time series needs at least 2 rows");
  }
  if (member_predictions.rows() != t_len ||
      static_cast<Eigen::Index>(timestamps.size()) != t_len) {
    throw ShapeMismatch("timestamps, targets and member predictions must have equal length");
  }
  if (k < 1 || static_cast<Eigen::Index>(member_names.size()) != k) {
    throw ShapeMismatch("one name per member column is required");
  }
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidArgument("quantile level must lie strictly inside (0, 1)");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw InvalidArgument("timestamps must be strictly increasing (row " +
                            std::to_string(i + 1) + ")");
    }
  }
  for (Eigen::Index t = 0; t < t_len; ++t) {
    if (!std::isfinite(targets[t])) {
      throw MissingData("target at row " + std::to_string(t + 1) + " is missing or non-finite");
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!std::isfinite(member_predictions(t, j))) {
        throw MissingData("prediction of member '" + member_names[static_cast<std::size_t>(j)] +
                          "' at row " + std::to_string(t + 1) + " is missing or non-finite");
      }
    }
  }
  std::set<std::string> seen;
  for (const std::string& name : member_names) {
    if (name.empty() || !seen.insert(name).second) {
      throw InvalidArgument("member names must be unique and nonempty");
    }
  }
}

} // namespace ptse
