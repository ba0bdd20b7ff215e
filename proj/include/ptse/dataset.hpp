#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptse/time_series.hpp"

namespace ptse {

//! Parsed CSV table: header `timestamp,y,m:<label>,...`. The target column
//! is optional when `require_target` is false (prediction inputs carry only
//! member columns).
struct Dataset {
  std::vector<std::string> timestamps;
  bool has_targets = false;
  Eigen::VectorXd targets;
  Eigen::MatrixXd member_predictions;
  std::vector<std::string> member_names; // labels without the "m:" prefix
};

//! Reads and validates a dataset file. Timestamps must be ISO-8601 shaped
//! and strictly increasing (compared lexically); every numeric cell must
//! parse as a finite decimal. Errors are ParseError with path and line.
Dataset read_dataset(const std::string& path, bool require_target = true);

TimeSeriesFrame to_frame(const Dataset& dataset, double q);

//! One row of a forecast CSV (columns timestamp,quantile_value,level,cdf_residual).
struct ForecastRow {
  std::string timestamp;
  double quantile_value = 0.0;
  double level = 0.0;
  double cdf_residual = 0.0;
};

void write_forecast_csv(const std::string& path, const std::vector<ForecastRow>& rows);
std::vector<ForecastRow> read_forecast_csv(const std::string& path);

//! Accepts YYYY-MM-DD with an optional T/space time part (HH:MM[:SS[.frac]])
//! and optional zone suffix (Z or +hh:mm); lexical order == time order for
//! equal-shaped stamps.
bool is_iso8601(const std::string& s);

} // namespace ptse
