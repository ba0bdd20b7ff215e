#include "ptse/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptse/errors.hpp"
#include "ptse/format.hpp"
#include "ptse/hmm.hpp"
#include "ptse/math.hpp"
#include "ptse/rng.hpp"

namespace ptse {

namespace {

//! Stream tags so the matrix draw, the initial-distribution draws and the
//! trajectory draws never overlap.
constexpr std::uint64_t kMatrixStream = 0xA11CE;
constexpr std::uint64_t kReplicationStream = 0x5EED;

Eigen::VectorXd default_means(Eigen::Index k)
{
  Eigen::VectorXd m(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    m[i] = 0.2 * static_cast<double>(i + 1);
  }
  return m;
}

Eigen::VectorXd default_stddevs(Eigen::Index k)
{
  Eigen::VectorXd s(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    s[i] = std::sqrt(static_cast<double>(i + 1)) + 1.0;
  }
  return s;
}

//! Shared trajectory core: draws states then observations from one stream.
void sample_path(const Eigen::MatrixXd& transition,
                 const Eigen::VectorXd& means,
                 const Eigen::VectorXd& stddevs,
                 const Eigen::VectorXd& initial,
                 Eigen::Index t_len,
                 Rng& rng,
                 Eigen::VectorXi& states,
                 Eigen::VectorXd& observations)
{
  const Eigen::Index k = transition.rows();
  Eigen::MatrixXd row_cumulative(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      acc += transition(i, j);
      row_cumulative(i, j) = acc;
    }
  }
  Eigen::VectorXd initial_cumulative(k);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    acc += initial[i];
    initial_cumulative[i] = acc;
  }

  states.resize(t_len);
  observations.resize(t_len);
  Eigen::Index s = 0;
  for (Eigen::Index t = 0; t < t_len; ++t) {
    if (t == 0) {
      s = rng.categorical_from_cumulative(initial_cumulative);
    } else {
      s = rng.categorical_from_cumulative(row_cumulative.row(s).transpose());
    }
    states[t] = static_cast<int>(s);
    observations[t] = means[s] + stddevs[s] * rng.normal();
  }
}

} // namespace

void SimConfig::validate() const
{
  if (states < 1 || length < 1 || replications < 1) {
    throw InvalidArgument("simulation needs states >= 1, length >= 1, replications >= 1");
  }
  if (transition && transition->size() != states) {
    throw ShapeMismatch("transition matrix size does not match the state count");
  }
  if (means.size() != 0 && means.size() != states) {
    throw ShapeMismatch("means length does not match the state count");
  }
  if (stddevs.size() != 0 && stddevs.size() != states) {
    throw ShapeMismatch("stddevs length does not match the state count");
  }
  if (stddevs.size() != 0 && (stddevs.array() <= 0.0).any()) {
    throw InvalidArgument("emission stddevs must be positive");
  }
  if (!std::isfinite(tau)) {
    throw InvalidArgument("tau must be finite");
  }
}

SimConfig SimConfig::resolved() const
{
  validate();
  SimConfig r = *this;
  if (!r.transition) {
    r.transition = random_transition_matrix(states, mix_seed(seed, kMatrixStream));
  }
  if (r.means.size() == 0) {
    r.means = default_means(states);
  }
  if (r.stddevs.size() == 0) {
    r.stddevs = default_stddevs(states);
  }
  return r;
}

TransitionMatrix random_transition_matrix(Eigen::Index k, std::uint64_t seed)
{
  if (k < 1) {
    throw InvalidArgument("state count must be >= 1");
  }
  Rng rng(seed);
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      a(i, j) = rng.uniform01();
    }
    a.row(i) /= a.row(i).sum();
  }
  return TransitionMatrix(std::move(a));
}

HmmSample sample_hmm(const SimConfig& config, const StateDistribution& initial)
{
  const SimConfig cfg = config.resolved();
  if (initial.size() != cfg.states) {
    throw ShapeMismatch("initial distribution size does not match the state count");
  }
  Rng rng(mix_seed(cfg.seed, kReplicationStream, 0));
  HmmSample sample;
  sample_path(cfg.transition->entries(), cfg.means, cfg.stddevs, initial.probs(), cfg.length,
              rng, sample.states, sample.observations);
  return sample;
}

double ConvergenceReport::mean_terminal_gap() const
{
  return (trajectories.col(trajectories.cols() - 1).array() - limit).abs().mean();
}

ConvergenceReport run_convergence_experiment(const SimConfig& config)
{
  const SimConfig cfg = config.resolved();
  const Eigen::Index k = cfg.states;
  const Eigen::Index t_len = cfg.length;
  const int reps = cfg.replications;

  const StateDistribution pi_star =
    stationary_distribution(*cfg.transition, StateDistribution::uniform(k));

  double limit = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    limit += pi_star.probs()[i] * normal_cdf((cfg.tau - cfg.means[i]) / cfg.stddevs[i]);
  }

  ConvergenceReport report;
  report.config = cfg;
  report.limit = limit;
  report.trajectories.resize(reps, t_len);

  Eigen::VectorXi states;
  Eigen::VectorXd observations;
  for (int r = 0; r < reps; ++r) {
    Rng rng(mix_seed(cfg.seed, kReplicationStream, static_cast<std::uint64_t>(r)));
    // Initial distribution uniform on the simplex: normalized exponentials.
    Eigen::VectorXd pi0(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      pi0[i] = -std::log(rng.uniform01());
    }
    pi0 /= pi0.sum();

    sample_path(cfg.transition->entries(), cfg.means, cfg.stddevs, pi0, t_len, rng, states,
                observations);

    long count = 0;
    for (Eigen::Index t = 0; t < t_len; ++t) {
      count += observations[t] <= cfg.tau ? 1 : 0;
      report.trajectories(r, t) = static_cast<double>(count) / static_cast<double>(t + 1);
    }
  }

  report.mean_trajectory = report.trajectories.colwise().mean();
  report.band_lo.resize(t_len);
  report.band_hi.resize(t_len);
  std::vector<double> column(static_cast<std::size_t>(reps));
  const auto quantile = [&column](double level) {
    // Linear interpolation between order statistics.
    const double pos = level * static_cast<double>(column.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, column.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return column[lo] + frac * (column[hi] - column[lo]);
  };
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (int r = 0; r < reps; ++r) {
      column[static_cast<std::size_t>(r)] = report.trajectories(r, t);
    }
    std::sort(column.begin(), column.end());
    report.band_lo[t] = quantile(0.025);
    report.band_hi[t] = quantile(0.975);
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& csv_path)
{
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) {
    throw Error("cannot open '" + csv_path + "' for writing");
  }
  csv << "replication,t,empirical_cdf\n";
  for (Eigen::Index r = 0; r < report.trajectories.rows(); ++r) {
    for (Eigen::Index t = 0; t < report.trajectories.cols(); ++t) {
      csv << (r + 1) << ',' << (t + 1) << ',' << format_double(report.trajectories(r, t))
          << '\n';
    }
  }
  csv.close();

  nlohmann::json meta;
  meta["schema"] = "ptse-convergence";
  meta["version"] = 1;
  meta["states"] = report.config.states;
  meta["length"] = report.config.length;
  meta["replications"] = report.config.replications;
  meta["tau"] = report.config.tau;
  meta["seed"] = report.config.seed;
  meta["limit"] = report.limit;
  meta["mean_terminal_gap"] = report.mean_terminal_gap();
  nlohmann::json rows = nlohmann::json::array();
  const Eigen::MatrixXd& a = report.config.transition->entries();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      row.push_back(a(i, j));
    }
    rows.push_back(std::move(row));
  }
  meta["transition"] = std::move(rows);
  meta["means"] = std::vector<double>(report.config.means.data(),
                                      report.config.means.data() + report.config.means.size());
  meta["stddevs"] = std::vector<double>(
    report.config.stddevs.data(), report.config.stddevs.data() + report.config.stddevs.size());

  std::ofstream side(csv_path + ".meta.json", std::ios::binary);
  if (!side) {
    throw Error("cannot open '" + csv_path + ".meta.json' for writing");
  }
  side << meta.dump(2) << "\n";
}

} // namespace ptse
