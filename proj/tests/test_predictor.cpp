#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptse/errors.hpp"
#include "ptse/predictor.hpp"
#include "test_support.hpp"

using namespace ptse;
using test_support::random_model;

namespace {

ForecastInput input_of(std::initializer_list<double> values)
{
  ForecastInput input;
  input.member_predictions.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    input.member_predictions[i++] = v;
  }
  input.horizon_label = "h";
  return input;
}

//! Integration bracket wide enough to hold all mixture mass.
std::pair<double, double> support_of(const EnsembleModel& model, const ForecastInput& input)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < model.emissions.size(); ++k) {
    const double m = input.member_predictions[static_cast<Eigen::Index>(k)];
    lo = std::min(lo, m + model.emissions[k].residuals.minCoeff() -
                        15.0 * model.emissions[k].bandwidth);
    hi = std::max(hi, m + model.emissions[k].residuals.maxCoeff() +
                        15.0 * model.emissions[k].bandwidth);
  }
  return { lo, hi };
}

} // namespace

TEST_CASE("ensemble_pdf composes the member emissions")
{
  Rng rng(10101);
  SUBCASE("single member is the shifted emission")
  {
    const EnsembleModel model = random_model(rng, 1, 0.5);
    const ForecastInput input = input_of({ 2.5 });
    for (double y : { 1.0, 2.0, 2.5, 3.7 }) {
      CHECK(ensemble_pdf(model, input, y) ==
            doctest::Approx(emission_pdf(model.emissions[0], y - 2.5)).epsilon(1e-14));
    }
  }
  SUBCASE("identical components make the weights irrelevant")
  {
    EnsembleModel model = random_model(rng, 2, 0.5);
    model.emissions[1] = model.emissions[0];
    const ForecastInput input = input_of({ 1.0, 1.0 });
    for (double y : { 0.0, 0.5, 1.0, 2.0 }) {
      CHECK(ensemble_pdf(model, input, y) ==
            doctest::Approx(emission_pdf(model.emissions[0], y - 1.0)).epsilon(1e-12));
    }
  }
  SUBCASE("random three-member mixture matches the direct weighted sum")
  {
    const EnsembleModel model = random_model(rng, 3, 0.4);
    const ForecastInput input = input_of({ -1.0, 0.3, 2.0 });
    for (int i = 0; i < 10; ++i) {
      const double y = 6.0 * (rng.uniform01() - 0.5);
      double expected = 0.0;
      for (int k = 0; k < 3; ++k) {
        expected += model.stationary.probs()[k] *
                    emission_pdf(model.emissions[static_cast<std::size_t>(k)],
                                 y - input.member_predictions[k]);
      }
      CHECK(ensemble_pdf(model, input, y) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("mismatched input length is rejected")
  {
    const EnsembleModel model = random_model(rng, 2, 0.5);
    CHECK_THROWS_AS(ensemble_pdf(model, input_of({ 1.0 }), 0.0), ShapeMismatch);
  }
}

TEST_CASE("ensemble_pdf integrates to one")
{
  Rng rng(772);
  for (int trial = 0; trial < 5; ++trial) {
    const EnsembleModel model = random_model(rng, 2 + trial % 2, 0.3 + 0.4 * rng.uniform01());
    ForecastInput input;
    input.member_predictions = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.emissions.size()));
    for (Eigen::Index k = 0; k < input.member_predictions.size(); ++k) {
      input.member_predictions[k] = 3.0 * (rng.uniform01() - 0.5);
    }
    const auto [lo, hi] = support_of(model, input);
    const double total = oracle::quadrature(
      [&](double y) { return ensemble_pdf(model, input, y); }, lo, hi, 1e-10);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("ensemble_quantile inverts the mixture CDF")
{
  Rng rng(31337);
  SUBCASE("single member: the zero-quantile constraint places tau at the prediction")
  {
    const EnsembleModel model = random_model(rng, 1, 0.5);
    const ForecastInput input = input_of({ 4.2 });
    const EnsembleForecast forecast = ensemble_quantile(model, input);
    CHECK(forecast.quantile_value == doctest::Approx(4.2).epsilon(1e-9));
    CHECK(forecast.cdf_residual <= 1e-9);
  }
  SUBCASE("symmetric two-member case is centered")
  {
    EnsembleModel model = random_model(rng, 2, 0.5);
    model.emissions[1] = model.emissions[0];
    // Make the emission symmetric about zero so the mixture median is 0.
    Eigen::VectorXd residuals(4);
    residuals << -1.5, -0.4, 0.4, 1.5;
    const MqeEmission symmetric =
      build_emission(residuals, Eigen::VectorXd::Ones(4), 0.6, 0.5);
    model.emissions[0] = symmetric;
    model.emissions[1] = symmetric;
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.5, 0.5, 0.5;
    model.transition = TransitionMatrix(a);
    model.stationary = StateDistribution::uniform(2);
    const EnsembleForecast forecast = ensemble_quantile(model, input_of({ -2.0, 2.0 }));
    CHECK(forecast.quantile_value == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("random models: quadrature re-check and shift equivariance")
  {
    for (int trial = 0; trial < 10; ++trial) {
      const double q = 0.2 + 0.6 * rng.uniform01();
      const EnsembleModel model = random_model(rng, 3, q);
      ForecastInput input = input_of({ 0.0, 0.0, 0.0 });
      for (Eigen::Index k = 0; k < 3; ++k) {
        input.member_predictions[k] = 4.0 * (rng.uniform01() - 0.5);
      }
      const EnsembleForecast forecast = ensemble_quantile(model, input);
      CHECK(forecast.cdf_residual <= 1e-9);
      CHECK(forecast.level == q);
      REQUIRE(forecast.mixture_summary.size() == 3);

      const auto [lo, hi] = support_of(model, input);
      (void)hi;
      const double mass = oracle::quadrature(
        [&](double y) { return ensemble_pdf(model, input, y); }, lo,
        forecast.quantile_value, 1e-11);
      CHECK(std::abs(mass - q) <= 1e-8);

      const double shift = 7.25;
      ForecastInput shifted = input;
      shifted.member_predictions.array() += shift;
      const EnsembleForecast forecast2 = ensemble_quantile(model, shifted);
      CHECK(forecast2.quantile_value ==
            doctest::Approx(forecast.quantile_value + shift).epsilon(1e-9));
    }
  }
  SUBCASE("monotone CDF")
  {
    const EnsembleModel model = random_model(rng, 2, 0.5);
    const ForecastInput input = input_of({ 0.0, 1.0 });
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double y = -6.0 + 12.0 * i / 40.0;
      const double c = ensemble_cdf(model, input, y);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("q_risk matches hand and spreadsheet computations")
{
  SUBCASE("perfect forecast")
  {
    Eigen::VectorXd y(3);
    y << 1.0, -2.0, 3.0;
    CHECK(q_risk(y, y, 0.5) == 0.0);
  }
  SUBCASE("single-point arithmetic")
  {
    Eigen::VectorXd y(1);
    y << 10.0;
    Eigen::VectorXd yhat(1);
    yhat << 8.0;
    CHECK(q_risk(y, yhat, 0.9) == doctest::Approx(0.36).epsilon(1e-12));
  }
  SUBCASE("frozen random vectors")
  {
    Eigen::VectorXd y(12);
    y << 7.245027610188192, 13.722412478645932, 14.953789526047839, 5.492594069844923,
      12.796546369617595, 1.6158860240342054, -3.6145489841305456, -4.488274150885396,
      -1.8981321275081209, 9.212908518138628, 11.85513010072781, 2.7155523416151333;
    Eigen::VectorXd yhat(12);
    yhat << 6.823502625622082, 12.448405856843312, 17.118075386587797, 5.434061357941942,
      15.4215553676188, 0.7477902422080427, -3.2867729272561514, -3.787125495279163,
      -0.42891136595813784, 7.086381387130249, 12.86258625436853, 1.3492969944204405;
    CHECK(q_risk(y, yhat, 0.5) == doctest::Approx(0.16080470986131143).epsilon(1e-12));
    CHECK(q_risk(y, yhat, 0.9) == doctest::Approx(0.14134318199256363).epsilon(1e-12));
  }
  SUBCASE("errors")
  {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(q_risk(y, y, 0.5), ZeroDenominator);
    Eigen::VectorXd a(2);
    a << 1.0, 2.0;
    Eigen::VectorXd b(3);
    b << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(q_risk(a, b, 0.5), ShapeMismatch);
  }
  SUBCASE("nonnegative, zero only at equality")
  {
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd y(8);
      Eigen::VectorXd yhat(8);
      for (Eigen::Index i = 0; i < 8; ++i) {
        y[i] = 5.0 * rng.normal() + 1.0;
        yhat[i] = y[i] + (rng.uniform01() < 0.5 ? 0.0 : rng.normal());
      }
      const double risk = q_risk(y, yhat, 0.3);
      CHECK(risk >= 0.0);
      if ((y - yhat).cwiseAbs().maxCoeff() == 0.0) {
        CHECK(risk == 0.0);
      }
    }
  }
}
