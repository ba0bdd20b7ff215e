#include "ptse/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ptse/hmm.hpp"
#include "ptse/rng.hpp"
#include "ptse/wkde.hpp"

namespace ptse {

namespace {

constexpr double kLikelihoodFloor = 1e-300;
constexpr double kGammaFloor = 1e-300;

//! Bandwidth for a sample with no spread, where Silverman's rule is zero.
double degenerate_pilot(const Eigen::VectorXd& values)
{
  return 1e-6 * std::max(1.0, std::abs(values[0]));
}

struct Parameters {
  TransitionMatrix transition;
  StateDistribution initial;
  Eigen::VectorXd sigmas;
  std::vector<MqeEmission> emissions;
};

Eigen::MatrixXd likelihood_table(const Eigen::MatrixXd& residuals,
                                 const std::vector<MqeEmission>& emissions,
                                 const std::vector<std::string>& names,
                                 int iteration,
                                 long& floored)
{
  const Eigen::Index k = residuals.cols();
  Eigen::MatrixXd table(residuals.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    table.col(j) = emission_pdf_batch(emissions[static_cast<std::size_t>(j)], residuals.col(j));
    if (!table.col(j).allFinite()) {
      throw NonFiniteLikelihood("emission of member '" + names[static_cast<std::size_t>(j)] +
                                "' produced a non-finite density at iteration " +
                                std::to_string(iteration));
    }
  }
  floored += (table.array() < kLikelihoodFloor).count();
  table = table.cwiseMax(kLikelihoodFloor);
  return table;
}

} // namespace

void FitConfig::validate() const
{
  if (max_iters < 1 || bootstrap_b < 1 || bandwidth_candidates.count < 1) {
    throw InvalidArgument("fit config counts must be >= 1");
  }
  if (!(loglik_tol > 0.0) || !(param_tol > 0.0) || !(pi_star_tol > 0.0)) {
    throw InvalidArgument("fit config tolerances must be positive");
  }
  if (!(bandwidth_candidates.lo_factor > 0.0) ||
      !(bandwidth_candidates.hi_factor >= bandwidth_candidates.lo_factor)) {
    throw InvalidArgument("bad bandwidth candidate factors");
  }
  if (bandwidth_freeze_after < 0) {
    throw InvalidArgument("bandwidth_freeze_after must be >= 0");
  }
}

EnsembleModel fit(const TimeSeriesFrame& series, const FitConfig& config, WarningLog* warnings)
{
  config.validate();
  const Eigen::Index t_len = series.length();
  const Eigen::Index k = series.members();
  if (t_len < 2 * k) {
    warn(warnings, "small-sample",
         "series length " + std::to_string(t_len) + " is below 2K = " +
           std::to_string(2 * k) + "; the fit may not be identifiable");
  }

  const Eigen::MatrixXd residuals = build_residuals(series);

  Parameters cur{ TransitionMatrix::uniform(k), StateDistribution::uniform(k),
                  Eigen::VectorXd(k), {} };
  cur.emissions.reserve(static_cast<std::size_t>(k));
  const Eigen::VectorXd uniform_gamma = Eigen::VectorXd::Ones(t_len);
  for (Eigen::Index j = 0; j < k; ++j) {
    const std::string& name = series.member_names[static_cast<std::size_t>(j)];
    double sigma = silverman_bandwidth(WeightedSample(residuals.col(j), uniform_gamma));
    if (!(sigma > 0.0)) {
      sigma = degenerate_pilot(residuals.col(j));
      warn(warnings, "degenerate-sample",
           "member '" + name + "': residuals have no spread; using a nominal bandwidth");
    }
    cur.sigmas[j] = sigma;
    cur.emissions.push_back(
      build_emission(residuals.col(j), uniform_gamma, sigma, series.q, warnings, name));
  }

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.max_iters));
  long floored = 0;
  bool converged = false;
  double best_ll = -std::numeric_limits<double>::infinity();
  Parameters best = cur;
  double last_param_delta = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const EmissionLikelihoodTable table(
      likelihood_table(residuals, cur.emissions, series.member_names, iter, floored));
    const PosteriorTables posteriors = forward_backward(table, cur.transition, cur.initial);
    trace.push_back(posteriors.log_likelihood);

    if (posteriors.log_likelihood > best_ll) {
      best_ll = posteriors.log_likelihood;
      best = cur;
    }
    if (iter >= 2 &&
        std::abs(trace[trace.size() - 1] - trace[trace.size() - 2]) < config.loglik_tol &&
        last_param_delta < config.param_tol) {
      converged = true;
      break;
    }

    // M step.
    TransitionMatrix transition = update_transition(posteriors, warnings);
    StateDistribution initial = update_initial(posteriors);
    Eigen::VectorXd sigmas = cur.sigmas;
    std::vector<MqeEmission> emissions;
    if (config.freeze_emissions) {
      emissions = cur.emissions;
    } else {
      emissions.reserve(static_cast<std::size_t>(k));
      for (Eigen::Index j = 0; j < k; ++j) {
        const std::string& name = series.member_names[static_cast<std::size_t>(j)];
        const Eigen::VectorXd gamma = posteriors.gamma.col(j).cwiseMax(kGammaFloor);
        if (iter <= config.bandwidth_freeze_after) {
          const WeightedSample weighted(residuals.col(j), gamma);
          const double pilot = silverman_bandwidth(weighted);
          if (pilot > 0.0) {
            const Eigen::VectorXd candidates = default_bandwidth_candidates(
              pilot, config.bandwidth_candidates.count, config.bandwidth_candidates.lo_factor,
              config.bandwidth_candidates.hi_factor);
            const BandwidthSelection sel = select_bandwidth(
              weighted, candidates, config.bootstrap_b,
              mix_seed(config.seed, static_cast<std::uint64_t>(iter), fnv1a64(name)), warnings);
            sigmas[j] = sel.sigma_star;
          } else {
            warn(warnings, "degenerate-sample",
                 "member '" + name + "': residuals have no spread; keeping previous bandwidth");
          }
        }
        emissions.push_back(
          build_emission(residuals.col(j), gamma, sigmas[j], series.q, warnings, name));
      }
    }

    double delta = (transition.entries() - cur.transition.entries()).cwiseAbs().maxCoeff();
    delta = std::max(delta, (initial.probs() - cur.initial.probs()).cwiseAbs().maxCoeff());
    delta = std::max(delta, (sigmas - cur.sigmas).cwiseAbs().maxCoeff());
    last_param_delta = delta;

    cur = Parameters{ std::move(transition), std::move(initial), std::move(sigmas),
                      std::move(emissions) };
  }

  if (!converged) {
    warn(warnings, "no-convergence",
         "EM hit the iteration cap before parameters settled; returning the best iterate");
    cur = best;
  }

  EnsembleModel model{ cur.transition,
                       cur.initial,
                       stationary_distribution(cur.transition, cur.initial, config.pi_star_tol),
                       std::move(cur.emissions),
                       series.q,
                       series.member_names,
                       std::move(trace),
                       converged,
                       0,
                       floored };
  model.iterations = static_cast<int>(model.fit_trace.size());
  if (floored > 0) {
    warn(warnings, "floored-likelihood",
         std::to_string(floored) + " emission likelihood entries were floored at 1e-300");
  }
  return model;
}

double loglik(const TimeSeriesFrame& series, const EnsembleModel& model)
{
  if (series.members() != static_cast<Eigen::Index>(model.emissions.size())) {
    throw ShapeMismatch("series has " + std::to_string(series.members()) +
                        " members, model has " + std::to_string(model.emissions.size()));
  }
  if (series.q != model.q) {
    throw ShapeMismatch("series level q does not match the model's");
  }
  const Eigen::MatrixXd residuals = build_residuals(series);
  long floored = 0;
  const EmissionLikelihoodTable table(
    likelihood_table(residuals, model.emissions, series.member_names, 0, floored));
  return forward_backward(table, model.transition, model.initial).log_likelihood;
}

} // namespace ptse
