#include "ptse/mqe.hpp"

#include <cmath>
#include <string>

#include "ptse/errors.hpp"
#include "ptse/math.hpp"

namespace ptse {

Eigen::MatrixXd build_residuals(const TimeSeriesFrame& series)
{
  return series.targets.replicate(1, series.members()) - series.member_predictions;
}

SideConstants solve_side_constants(const Eigen::VectorXd& residuals,
                                   const Eigen::VectorXd& gamma_weights,
                                   double bandwidth,
                                   double q,
                                   WarningLog* warnings,
                                   std::string_view member)
{
  const Eigen::Index n = residuals.size();
  if (n < 1 || gamma_weights.size() != n) {
    throw InvalidArgument("residuals and gamma weights must have equal nonzero length");
  }
  if (!(bandwidth > 0.0) || !(q > 0.0) || !(q < 1.0)) {
    throw InvalidArgument("need bandwidth > 0 and q in (0, 1)");
  }
  const double gamma_sum = gamma_weights.sum();
  if (!(gamma_sum > 0.0)) {
    throw InvalidArgument("gamma weights must have positive sum");
  }

  const std::string who = member.empty() ? std::string("sample") : "member '" + std::string(member) + "'";
  const auto fallback = [&](const char* code, const std::string& message) {
    warn(warnings, code, message);
    const double w = 1.0 / gamma_sum;
    return SideConstants{ w, w, false };
  };

  // Group sums: S_l for the mass equation, R_l for the quantile equation,
  // with v_t = Phi(-eps_t / sigma) the kernel mass left of zero. A tie
  // eps = 0 belongs to the nonpositive side.
  double s_neg = 0.0;
  double s_pos = 0.0;
  double r_neg = 0.0;
  double r_pos = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double v = normal_cdf(-residuals[t] / bandwidth);
    const double g = gamma_weights[t];
    if (residuals[t] <= 0.0) {
      s_neg += g;
      r_neg += g * v;
    } else {
      s_pos += g;
      r_pos += g * v;
    }
  }

  if (s_neg == 0.0 || s_pos == 0.0) {
    return fallback("one-sided-residuals",
                    who + ": residuals all fall on one side of zero; the zero-quantile "
                          "constraint was dropped (plain weighted KDE)");
  }

  const double det = s_neg * r_pos - s_pos * r_neg;
  if (std::abs(det) <= 1e-14 * std::max(s_neg, s_pos) * std::max(std::abs(r_neg), std::abs(r_pos))) {
    throw SingularSystem("side-constant system is singular for " + who);
  }
  const double w_neg = (r_pos - q * s_pos) / det;
  const double w_pos = (q * s_neg - r_neg) / det;
  if (w_neg < 0.0 || w_pos < 0.0) {
    return fallback("negative-side-constant",
                    who + ": the zero-quantile constraint is infeasible at this level; "
                          "constraint dropped (plain weighted KDE)");
  }
  return SideConstants{ w_neg, w_pos, true };
}

MqeEmission::MqeEmission(Eigen::VectorXd residuals_in,
                         Eigen::VectorXd gamma_weights_in,
                         double bandwidth_in,
                         SideConstants side,
                         double q_in)
  : residuals(std::move(residuals_in))
  , gamma_weights(std::move(gamma_weights_in))
  , bandwidth(bandwidth_in)
  , w_neg(side.w_neg)
  , w_pos(side.w_pos)
  , q(q_in)
  , constrained(side.constrained)
{
  if (residuals.size() < 1 || residuals.size() != gamma_weights.size()) {
    throw InvalidArgument("emission needs matching nonempty residuals and weights");
  }
  if (!residuals.allFinite() || !gamma_weights.allFinite() ||
      (gamma_weights.array() <= 0.0).any()) {
    throw InvalidArgument("emission residuals/weights must be finite, weights positive");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("emission bandwidth must be positive and finite");
  }
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidArgument("emission level must lie in (0, 1)");
  }
  if (!(w_neg >= 0.0) || !(w_pos >= 0.0)) {
    throw InvalidArgument("side constants must be nonnegative");
  }
}

MqeEmission build_emission(Eigen::VectorXd residuals,
                           Eigen::VectorXd gamma_weights,
                           double bandwidth,
                           double q,
                           WarningLog* warnings,
                           std::string_view member)
{
  SideConstants side = solve_side_constants(residuals, gamma_weights, bandwidth, q, warnings, member);
  return MqeEmission(std::move(residuals), std::move(gamma_weights), bandwidth, side, q);
}

namespace {

//! Per-sample coefficient I_{t,l} W_l gamma_t.
Eigen::ArrayXd side_coefficients(const MqeEmission& e)
{
  return (e.residuals.array() <= 0.0)
    .select(e.w_neg * e.gamma_weights.array(), e.w_pos * e.gamma_weights.array());
}

} // namespace

double emission_pdf(const MqeEmission& e, double eps)
{
  const Eigen::ArrayXd coeff = side_coefficients(e);
  const double acc =
    (coeff * (-0.5 * ((eps - e.residuals.array()) / e.bandwidth).square()).exp()).sum();
  return kInvSqrt2Pi * acc / e.bandwidth;
}

double emission_cdf(const MqeEmission& e, double eps)
{
  const Eigen::ArrayXd coeff = side_coefficients(e);
  double acc = 0.0;
  for (Eigen::Index t = 0; t < e.residuals.size(); ++t) {
    acc += coeff[t] * normal_cdf((eps - e.residuals[t]) / e.bandwidth);
  }
  return acc;
}

Eigen::VectorXd emission_pdf_batch(const MqeEmission& e, const Eigen::VectorXd& eps)
{
  const Eigen::ArrayXd coeff = side_coefficients(e);
  const double norm = kInvSqrt2Pi / e.bandwidth;
  const auto res = e.residuals.array();
  Eigen::VectorXd out(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    out[i] = norm * (coeff * (-0.5 * ((eps[i] - res) / e.bandwidth).square()).exp()).sum();
  }
  return out;
}

} // namespace ptse
