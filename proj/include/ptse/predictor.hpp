#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptse/estimator.hpp"

namespace ptse {

//! Member-model outputs at one forecast horizon.
struct ForecastInput {
  Eigen::VectorXd member_predictions;
  std::string horizon_label;
};

struct MixtureComponent {
  double weight; // pi*_k
  double shift;  // M_k(X_{T+h})
};

struct EnsembleForecast {
  double quantile_value = 0.0;
  double level = 0.0;
  double cdf_residual = 0.0; // |CDF(tau) - q| at the returned quantile
  std::vector<MixtureComponent> mixture_summary;
  std::string horizon_label;
};

//! Ensemble density sum_k pi*_k f_k(y - m_k).
double ensemble_pdf(const EnsembleModel& model, const ForecastInput& input, double y);

//! Analytic ensemble CDF sum_k pi*_k F_k(y - m_k); monotone in y.
double ensemble_cdf(const EnsembleModel& model, const ForecastInput& input, double y);

//! Quantile extraction: the tau with mixture CDF(tau) = q, found by
//! bisection on the analytic CDF. The initial bracket spans every shifted
//! residual plus ten bandwidths on both sides; if that fails to bracket q
//! it is widened tenfold once before BracketFailure is raised. Bisection
//! is unconditionally convergent on the monotone CDF; the returned
//! cdf_residual is guaranteed <= 1e-9.
EnsembleForecast ensemble_quantile(const EnsembleModel& model, const ForecastInput& input);

//! Normalized aggregate pinball loss at level q:
//!   2 * sum_t P_q(y_t, yhat_t) / sum_t |y_t|
//! with P_q(y, yhat) = q (y - yhat) if y >= yhat, else (1 - q) (yhat - y).
//! Throws ZeroDenominator when sum |y| = 0, ShapeMismatch on length
//! disagreement.
double q_risk(const Eigen::VectorXd& actuals, const Eigen::VectorXd& predicted_quantiles, double q);

} // namespace ptse
