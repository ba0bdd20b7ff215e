#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "ptse/time_series.hpp"
#include "ptse/warnings.hpp"

namespace ptse {

//! Residual matrix: entry (t, k) = y_t - M_k(X_t).
Eigen::MatrixXd build_residuals(const TimeSeriesFrame& series);

//! Side constants of the zero-quantile constraint system. When the system
//! is infeasible (`constrained` false) both constants fall back to
//! 1 / sum(gamma), which reduces the emission to a plain weighted KDE.
struct SideConstants {
  double w_neg = 0.0;
  double w_pos = 0.0;
  bool constrained = true;
};

//! Solves the 2x2 system that pins the q-th quantile of the residual
//! density at zero while normalizing its integral:
//!
//!   sum_t I_{t,l} W_l gamma_t         = 1
//!   sum_t I_{t,l} v_t W_l gamma_t     = q,    v_t = Phi(-eps_t / sigma)
//!
//! with side indicators I_{t,1} = [eps_t <= 0], I_{t,2} = [eps_t > 0].
//!
//! Residuals all on one side of zero make the system infeasible; so does
//! a negative solution component. Both cases fall back to the plain-WKDE
//! constants with a warning (`member` names the series in the message).
//! Throws SingularSystem when the 2x2 matrix is singular beyond 1e-14
//! conditioning, InvalidArgument for empty input or nonpositive gamma sum.
SideConstants solve_side_constants(const Eigen::VectorXd& residuals,
                                   const Eigen::VectorXd& gamma_weights,
                                   double bandwidth,
                                   double q,
                                   WarningLog* warnings = nullptr,
                                   std::string_view member = {});

//! One member's constrained residual density: a Gaussian mixture over the
//! member's residuals, gamma-weighted, with side constants W1/W2 scaling
//! the nonpositive and positive halves.
struct MqeEmission {
  MqeEmission(Eigen::VectorXd residuals_in,
              Eigen::VectorXd gamma_weights_in,
              double bandwidth_in,
              SideConstants side,
              double q_in);

  Eigen::VectorXd residuals;
  Eigen::VectorXd gamma_weights;
  double bandwidth;
  double w_neg;
  double w_pos;
  double q;
  bool constrained;
};

//! Convenience: solve the side constants and assemble the emission.
MqeEmission build_emission(Eigen::VectorXd residuals,
                           Eigen::VectorXd gamma_weights,
                           double bandwidth,
                           double q,
                           WarningLog* warnings = nullptr,
                           std::string_view member = {});

//! Density sum_t I_{t,l} W_l gamma_t (1/sigma) phi((eps - eps_t) / sigma).
double emission_pdf(const MqeEmission& e, double eps);

//! Analytic CDF of emission_pdf; equals q at eps = 0 when constrained.
double emission_cdf(const MqeEmission& e, double eps);

//! emission_pdf at many points (vectorized inner sum).
Eigen::VectorXd emission_pdf_batch(const MqeEmission& e, const Eigen::VectorXd& eps);

} // namespace ptse
