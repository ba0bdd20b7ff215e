#pragma once

#include <iostream>
#include <optional>
#include <string>

#include "ptse/estimator.hpp"
#include "ptse/simulator.hpp"

namespace ptse {

//! Exit-code contract shared by all subcommands:
//!   0 success, 1 hard error, 2 result produced with caveats.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSoftWarning = 2;

struct FitOptions {
  std::string input_csv;
  std::string output_model;
  double q = 0.5;
  FitConfig config;
};

struct PredictOptions {
  std::string model_file;
  std::string input_csv;
  std::string output_csv;
};

struct EvaluateOptions {
  std::string forecast_csv;
  std::string actuals_csv;
  std::optional<double> q; // default: the level recorded in the forecast
  std::string format = "text"; // "text" or "json-lines"
};

struct SimulateOptions {
  SimConfig config;
  std::string output_csv;
};

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

//! Full argv entry point (CLI11 parsing); used by the `ptse` binary.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ptse
