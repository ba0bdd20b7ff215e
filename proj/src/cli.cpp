#include "ptse/cli.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptse/dataset.hpp"
#include "ptse/errors.hpp"
#include "ptse/format.hpp"
#include "ptse/predictor.hpp"

namespace ptse {

namespace {

//! Each inner-module warning is printed exactly once, in first-seen order.
void print_warnings(const WarningLog& warnings, std::ostream& out)
{
  std::set<std::pair<std::string, std::string>> seen;
  for (const Warning& w : warnings) {
    if (seen.insert({ w.code, w.message }).second) {
      out << "warning[" << w.code << "]: " << w.message << "\n";
    }
  }
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << content;
}

} // namespace

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    const Dataset data = read_dataset(options.input_csv, /*require_target=*/true);
    const TimeSeriesFrame frame = to_frame(data, options.q);
    out << "fit: read '" << options.input_csv << "': T=" << frame.length()
        << " K=" << frame.members() << " q=" << format_double(options.q) << "\n";

    WarningLog warnings;
    const EnsembleModel model = fit(frame, options.config, &warnings);
    write_file(options.output_model, serialize(model));

    const double model_ll = model.converged
      ? model.fit_trace.back()
      : *std::max_element(model.fit_trace.begin(), model.fit_trace.end());
    out << (model.converged ? "fit: converged after " : "fit: no convergence after ")
        << model.iterations << " iterations; log-likelihood " << format_double(model_ll) << "\n";
    out << "fit: pi_star:";
    for (std::size_t k = 0; k < model.member_names.size(); ++k) {
      out << ' ' << model.member_names[k] << '='
          << format_double(model.stationary.probs()[static_cast<Eigen::Index>(k)]);
    }
    out << "\n";
    out << "fit: bandwidth:";
    for (std::size_t k = 0; k < model.member_names.size(); ++k) {
      out << ' ' << model.member_names[k] << '=' << format_double(model.emissions[k].bandwidth);
    }
    out << "\n";
    if (model.floored_likelihoods > 0) {
      out << "fit: floored likelihood entries: " << model.floored_likelihoods << "\n";
    }
    out << "note: member columns are taken as out-of-sample quantile forecasts at level q="
        << format_double(options.q) << "; this cannot be verified from the file\n";
    print_warnings(warnings, out);
    out << "fit: wrote model to '" << options.output_model << "'\n";
    return model.converged ? kExitOk : kExitSoftWarning;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitError;
  }
}

int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    const EnsembleModel model = deserialize(read_file(options.model_file));
    const Dataset data = read_dataset(options.input_csv, /*require_target=*/false);

    // Columns are matched by label, not position.
    std::vector<Eigen::Index> order;
    std::vector<std::string> missing;
    for (const std::string& name : model.member_names) {
      bool found = false;
      for (std::size_t c = 0; c < data.member_names.size(); ++c) {
        if (data.member_names[c] == name) {
          order.push_back(static_cast<Eigen::Index>(c));
          found = true;
          break;
        }
      }
      if (!found) {
        missing.push_back(name);
      }
    }
    std::vector<std::string> extra;
    for (const std::string& name : data.member_names) {
      if (std::find(model.member_names.begin(), model.member_names.end(), name) ==
          model.member_names.end()) {
        extra.push_back(name);
      }
    }
    if (!missing.empty() || !extra.empty()) {
      std::string msg = "member labels do not match the model;";
      for (const std::string& name : missing) {
        msg += " missing 'm:" + name + "'";
      }
      for (const std::string& name : extra) {
        msg += " extra 'm:" + name + "'";
      }
      throw Error(msg);
    }

    std::vector<ForecastRow> rows;
    rows.reserve(data.timestamps.size());
    for (std::size_t r = 0; r < data.timestamps.size(); ++r) {
      ForecastInput input;
      input.horizon_label = data.timestamps[r];
      input.member_predictions.resize(static_cast<Eigen::Index>(order.size()));
      for (std::size_t k = 0; k < order.size(); ++k) {
        input.member_predictions[static_cast<Eigen::Index>(k)] =
          data.member_predictions(static_cast<Eigen::Index>(r), order[k]);
      }
      const EnsembleForecast forecast = ensemble_quantile(model, input);
      rows.push_back(ForecastRow{ data.timestamps[r], forecast.quantile_value, forecast.level,
                                  forecast.cdf_residual });
    }
    write_forecast_csv(options.output_csv, rows);
    out << "predict: wrote " << rows.size() << " forecasts at q=" << format_double(model.q)
        << " to '" << options.output_csv << "'\n";
    return kExitOk;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitError;
  }
}

int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    const std::vector<ForecastRow> forecast = read_forecast_csv(options.forecast_csv);
    const Dataset actuals = read_dataset(options.actuals_csv, /*require_target=*/true);
    if (forecast.empty()) {
      throw Error("forecast file has no rows");
    }
    if (forecast.size() != actuals.timestamps.size()) {
      throw Error("forecast has " + std::to_string(forecast.size()) + " rows, actuals " +
                  std::to_string(actuals.timestamps.size()));
    }
    for (std::size_t r = 0; r < forecast.size(); ++r) {
      if (forecast[r].timestamp != actuals.timestamps[r]) {
        throw Error("timestamps differ at row " + std::to_string(r + 2) + ": forecast '" +
                    forecast[r].timestamp + "' vs actuals '" + actuals.timestamps[r] + "'");
      }
    }
    const double level = forecast[0].level;
    for (const ForecastRow& row : forecast) {
      if (row.level != level) {
        throw Error("forecast mixes quantile levels");
      }
    }
    const double q = options.q.value_or(level);
    if (options.q && std::abs(*options.q - level) > 1e-12) {
      throw Error("requested q=" + format_double(*options.q) +
                  " does not match the forecast level " + format_double(level));
    }

    Eigen::VectorXd predicted(static_cast<Eigen::Index>(forecast.size()));
    for (std::size_t r = 0; r < forecast.size(); ++r) {
      predicted[static_cast<Eigen::Index>(r)] = forecast[r].quantile_value;
    }
    const double risk = q_risk(actuals.targets, predicted, q);

    if (options.format == "json-lines") {
      nlohmann::json line;
      line["q"] = q;
      line["q_risk"] = risk;
      line["rows"] = forecast.size();
      out << line.dump() << "\n";
    } else {
      out << "evaluate: rows=" << forecast.size() << " q=" << format_double(q) << "\n";
      out << "evaluate: q_risk=" << format_double(risk) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitError;
  }
}

int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    const ConvergenceReport report = run_convergence_experiment(options.config);
    write_convergence_csv(report, options.output_csv);
    out << "simulate: K=" << report.config.states << " T=" << report.config.length
        << " replications=" << report.config.replications
        << " tau=" << format_double(report.config.tau) << " seed=" << report.config.seed << "\n";
    out << "simulate: limit = " << format_double(report.limit) << "\n";
    out << "simulate: mean terminal gap |F_T(tau) - limit| = "
        << format_double(report.mean_terminal_gap()) << "\n";
    out << "simulate: wrote '" << options.output_csv << "' and '" << options.output_csv
        << ".meta.json'\n";
    return kExitOk;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "pTSE: HMM-based distribution ensemble for probabilistic time series forecasting" };
  app.require_subcommand(1);
  app.set_config("--config")->description("key=value config file (flags take precedence)");

  const auto check_level = CLI::Range(0.0, 1.0).description("in (0,1)");

  FitOptions fit_options;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit an ensemble model to a training CSV");
  fit_cmd->add_option("--input", fit_options.input_csv, "training CSV (timestamp,y,m:<label>...)")
    ->required();
  fit_cmd->add_option("--output", fit_options.output_model, "model document to write")->required();
  fit_cmd->add_option("--q", fit_options.q, "quantile level in (0,1)")
    ->default_val(0.5)
    ->check(check_level);
  fit_cmd->add_option("--max-iters", fit_options.config.max_iters, "EM iteration cap")
    ->default_val(100);
  fit_cmd->add_option("--loglik-tol", fit_options.config.loglik_tol, "stop tolerance, nats")
    ->default_val(1e-6);
  fit_cmd->add_option("--param-tol", fit_options.config.param_tol, "stop tolerance on parameters")
    ->default_val(1e-5);
  fit_cmd->add_option("--bootstrap-b", fit_options.config.bootstrap_b, "bootstrap resamples")
    ->default_val(20);
  fit_cmd
    ->add_option("--candidates", fit_options.config.bandwidth_candidates.count,
                 "bandwidth candidate count")
    ->default_val(16);
  fit_cmd
    ->add_option("--bandwidth-freeze-after", fit_options.config.bandwidth_freeze_after,
                 "stop reselecting bandwidths after this many M steps")
    ->default_val(std::numeric_limits<int>::max());
  fit_cmd->add_option("--seed", fit_options.config.seed, "RNG seed")
    ->envname("PTSE_SEED")
    ->default_val(0);

  PredictOptions predict_options;
  CLI::App* predict_cmd =
    app.add_subcommand("predict", "invert the ensemble CDF at each horizon row");
  predict_cmd->add_option("--model", predict_options.model_file, "fitted model document")
    ->required();
  predict_cmd
    ->add_option("--input", predict_options.input_csv, "horizon CSV (timestamp,m:<label>...)")
    ->required();
  predict_cmd->add_option("--output", predict_options.output_csv, "forecast CSV to write")
    ->required();

  EvaluateOptions evaluate_options;
  double evaluate_q = -1.0;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "q-risk of a forecast CSV vs actuals");
  evaluate_cmd->add_option("--forecast", evaluate_options.forecast_csv, "forecast CSV")->required();
  evaluate_cmd->add_option("--actuals", evaluate_options.actuals_csv, "actuals CSV (with y)")
    ->required();
  CLI::Option* evaluate_q_opt =
    evaluate_cmd->add_option("--q", evaluate_q, "quantile level (default: forecast's level)")
      ->check(check_level);
  evaluate_cmd->add_option("--format", evaluate_options.format, "text or json-lines")
    ->default_val("text")
    ->check(CLI::IsMember({ "text", "json-lines" }));

  SimulateOptions simulate_options;
  std::vector<double> sim_means;
  std::vector<double> sim_stddevs;
  CLI::App* simulate_cmd =
    app.add_subcommand("simulate", "synthetic-HMM empirical-CDF convergence experiment");
  simulate_cmd->add_option("--k", simulate_options.config.states, "state count")->default_val(3);
  simulate_cmd->add_option("--t", simulate_options.config.length, "sequence length")
    ->default_val(1000);
  simulate_cmd->add_option("--reps", simulate_options.config.replications, "replications")
    ->default_val(100);
  simulate_cmd->add_option("--tau", simulate_options.config.tau, "evaluation threshold")
    ->default_val(0.5);
  simulate_cmd->add_option("--seed", simulate_options.config.seed, "RNG seed")
    ->envname("PTSE_SEED")
    ->default_val(0);
  simulate_cmd->add_option("--means", sim_means, "emission means (default 0.2k)")->delimiter(',');
  simulate_cmd->add_option("--stddevs", sim_stddevs, "emission stddevs (default sqrt(k)+1)")
    ->delimiter(',');
  simulate_cmd->add_option("--output", simulate_options.output_csv, "convergence CSV to write")
    ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream scratch;
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  if (fit_cmd->parsed()) {
    if (!(fit_options.q > 0.0) || !(fit_options.q < 1.0)) {
      err << "error: --q must lie strictly inside (0,1)\n";
      return kExitError;
    }
    return run_fit(fit_options, out, err);
  }
  if (predict_cmd->parsed()) {
    return run_predict(predict_options, out, err);
  }
  if (evaluate_cmd->parsed()) {
    if (evaluate_q_opt->count() > 0) {
      evaluate_options.q = evaluate_q;
    }
    return run_evaluate(evaluate_options, out, err);
  }
  if (simulate_cmd->parsed()) {
    if (!sim_means.empty()) {
      simulate_options.config.means =
        Eigen::Map<Eigen::VectorXd>(sim_means.data(), static_cast<Eigen::Index>(sim_means.size()));
    }
    if (!sim_stddevs.empty()) {
      simulate_options.config.stddevs = Eigen::Map<Eigen::VectorXd>(
        sim_stddevs.data(), static_cast<Eigen::Index>(sim_stddevs.size()));
    }
    return run_simulate(simulate_options, out, err);
  }
  err << "error: no subcommand\n";
  return kExitError;
}

} // namespace ptse
