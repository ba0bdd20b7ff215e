#include "ptse/predictor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ptse/errors.hpp"

namespace ptse {

namespace {

void check_shapes(const EnsembleModel& model, const ForecastInput& input)
{
  if (input.member_predictions.size() != static_cast<Eigen::Index>(model.emissions.size())) {
    throw ShapeMismatch("forecast input has " + std::to_string(input.member_predictions.size()) +
                        " member predictions, model has " +
                        std::to_string(model.emissions.size()));
  }
  if (!input.member_predictions.allFinite()) {
    throw InvalidArgument("member predictions must be finite");
  }
}

} // namespace

double ensemble_pdf(const EnsembleModel& model, const ForecastInput& input, double y)
{
  check_shapes(model, input);
  double acc = 0.0;
  for (std::size_t k = 0; k < model.emissions.size(); ++k) {
    acc += model.stationary.probs()[static_cast<Eigen::Index>(k)] *
           emission_pdf(model.emissions[k], y - input.member_predictions[static_cast<Eigen::Index>(k)]);
  }
  return acc;
}

double ensemble_cdf(const EnsembleModel& model, const ForecastInput& input, double y)
{
  check_shapes(model, input);
  double acc = 0.0;
  for (std::size_t k = 0; k < model.emissions.size(); ++k) {
    acc += model.stationary.probs()[static_cast<Eigen::Index>(k)] *
           emission_cdf(model.emissions[k], y - input.member_predictions[static_cast<Eigen::Index>(k)]);
  }
  return acc;
}

EnsembleForecast ensemble_quantile(const EnsembleModel& model, const ForecastInput& input)
{
  check_shapes(model, input);
  const double q = model.q;

  double sigma_max = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < model.emissions.size(); ++k) {
    const MqeEmission& e = model.emissions[k];
    const double m = input.member_predictions[static_cast<Eigen::Index>(k)];
    sigma_max = std::max(sigma_max, e.bandwidth);
    lo = std::min(lo, m + e.residuals.minCoeff());
    hi = std::max(hi, m + e.residuals.maxCoeff());
  }
  lo -= 10.0 * sigma_max;
  hi += 10.0 * sigma_max;

  if (ensemble_cdf(model, input, lo) > q || ensemble_cdf(model, input, hi) < q) {
    // Pathological numerical case: widen tenfold once, then give up.
    const double center = 0.5 * (lo + hi);
    const double half = 5.0 * (hi - lo);
    lo = center - half;
    hi = center + half;
    if (ensemble_cdf(model, input, lo) > q || ensemble_cdf(model, input, hi) < q) {
      throw BracketFailure("could not bracket the ensemble quantile");
    }
  }

  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ensemble_cdf(model, input, mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  EnsembleForecast forecast;
  forecast.quantile_value = 0.5 * (lo + hi);
  forecast.level = q;
  forecast.cdf_residual = std::abs(ensemble_cdf(model, input, forecast.quantile_value) - q);
  forecast.horizon_label = input.horizon_label;
  if (forecast.cdf_residual > 1e-9) {
    throw BracketFailure("bisection stalled; CDF residual " +
                         std::to_string(forecast.cdf_residual) + " above 1e-9");
  }
  forecast.mixture_summary.reserve(model.emissions.size());
  for (std::size_t k = 0; k < model.emissions.size(); ++k) {
    forecast.mixture_summary.push_back(
      MixtureComponent{ model.stationary.probs()[static_cast<Eigen::Index>(k)],
                        input.member_predictions[static_cast<Eigen::Index>(k)] });
  }
  return forecast;
}

double q_risk(const Eigen::VectorXd& actuals, const Eigen::VectorXd& predicted_quantiles, double q)
{
  if (actuals.size() != predicted_quantiles.size() || actuals.size() == 0) {
    throw ShapeMismatch("actuals and predictions must have equal nonzero length");
  }
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidArgument("quantile level must lie in (0, 1)");
  }
  const double denom = actuals.cwiseAbs().sum();
  if (!(denom > 0.0)) {
    throw ZeroDenominator("q-risk is undefined when all actuals are zero");
  }
  double loss = 0.0;
  for (Eigen::Index t = 0; t < actuals.size(); ++t) {
    const double y = actuals[t];
    const double yhat = predicted_quantiles[t];
    loss += y >= yhat ? q * (y - yhat) : (1.0 - q) * (yhat - y);
  }
  return 2.0 * loss / denom;
}

} // namespace ptse
