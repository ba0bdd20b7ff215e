#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "ptse/errors.hpp"
#include "ptse/math.hpp"
#include "ptse/mqe.hpp"
#include "ptse/rng.hpp"

using namespace ptse;

namespace {

TimeSeriesFrame tiny_frame(const Eigen::VectorXd& y, const Eigen::MatrixXd& preds, double q = 0.5)
{
  std::vector<std::string> stamps;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "2025-01-01T%02d:00:00", static_cast<int>(t));
    stamps.emplace_back(buf);
  }
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < preds.cols(); ++k) {
    names.push_back("m" + std::to_string(k));
  }
  return TimeSeriesFrame(stamps, y, preds, q, names);
}

MqeEmission random_feasible_emission(Rng& rng, double q, Eigen::Index n = 24)
{
  for (int attempt = 0; attempt < 50; ++attempt) {
    Eigen::VectorXd residuals(n);
    Eigen::VectorXd gamma(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      residuals[i] = rng.normal();
      gamma[i] = 0.1 + rng.uniform01();
    }
    // Shift so the empirical q-quantile sits near zero; extreme q would
    // otherwise make the constraint infeasible.
    std::vector<double> sorted(residuals.data(), residuals.data() + n);
    std::sort(sorted.begin(), sorted.end());
    residuals.array() -= sorted[static_cast<std::size_t>(q * static_cast<double>(n - 1))];
    if ((residuals.array() <= 0.0).count() == 0 || (residuals.array() > 0.0).count() == 0) {
      continue;
    }
    const double sigma = 0.3 + 0.7 * rng.uniform01();
    WarningLog warnings;
    MqeEmission e = build_emission(residuals, gamma, sigma, q, &warnings);
    if (e.constrained) {
      return e;
    }
  }
  FAIL("could not build a feasible emission");
  throw std::logic_error("unreachable");
}

} // namespace

TEST_CASE("build_residuals is the target minus each member prediction")
{
  SUBCASE("perfect member")
  {
    Eigen::VectorXd y(2);
    y << 1.0, 2.0;
    Eigen::MatrixXd preds(2, 1);
    preds << 1.0, 2.0;
    const Eigen::MatrixXd r = build_residuals(tiny_frame(y, preds));
    CHECK(r(0, 0) == 0.0);
    CHECK(r(1, 0) == 0.0);
  }
  SUBCASE("constant member")
  {
    Eigen::VectorXd y(2);
    y << 3.0, 5.0;
    Eigen::MatrixXd preds(2, 1);
    preds << 1.0, 1.0;
    const Eigen::MatrixXd r = build_residuals(tiny_frame(y, preds));
    CHECK(r(0, 0) == 2.0);
    CHECK(r(1, 0) == 4.0);
  }
  SUBCASE("missing cells are rejected at frame construction")
  {
    Eigen::VectorXd y(2);
    y << 1.0, std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd preds = Eigen::MatrixXd::Zero(2, 1);
    CHECK_THROWS_AS(tiny_frame(y, preds), MissingData);
  }
}

TEST_CASE("solve_side_constants on symmetric residuals at q = 1/2")
{
  Eigen::VectorXd residuals(2);
  residuals << -0.8, 0.8;
  const auto side = solve_side_constants(residuals, Eigen::VectorXd::Ones(2), 0.5, 0.5);
  CHECK(side.constrained);
  CHECK(side.w_neg == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(side.w_pos == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("solve_side_constants reproduces the hand-solved 2x2 system")
{
  Eigen::VectorXd residuals(2);
  residuals << -1.0, 1.0;
  const Eigen::VectorXd gamma = Eigen::VectorXd::Ones(2);
  const double sigma = 0.5;
  const double q = 0.9;
  const auto side = solve_side_constants(residuals, gamma, sigma, q);
  REQUIRE(side.constrained);

  const double v1 = normal_cdf(2.0);  // residual -1: Phi(-(-1)/0.5)
  const double v2 = normal_cdf(-2.0); // residual +1
  CHECK(v1 == doctest::Approx(0.97725).epsilon(1e-4));
  CHECK(v2 == doctest::Approx(0.02275).epsilon(1e-3));
  // Both constraint equations hold at the returned solution.
  CHECK(side.w_neg * 1.0 + side.w_pos * 1.0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(side.w_neg * v1 + side.w_pos * v2 == doctest::Approx(q).epsilon(1e-12));
  // And it agrees with an independent dense solve.
  Eigen::Matrix2d system;
  system << 1.0, 1.0, v1, v2;
  Eigen::Vector2d rhs(1.0, q);
  const Eigen::Vector2d w = system.colPivHouseholderQr().solve(rhs);
  CHECK(side.w_neg == doctest::Approx(w[0]).epsilon(1e-12));
  CHECK(side.w_pos == doctest::Approx(w[1]).epsilon(1e-12));
}

TEST_CASE("solve_side_constants self-consistency on random feasible instances")
{
  Rng rng(5081);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.uniform01() * 30.0);
    Eigen::VectorXd residuals(n);
    Eigen::VectorXd gamma(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      residuals[i] = 2.0 * rng.normal();
      gamma[i] = 0.05 + rng.uniform01();
    }
    residuals[0] = -std::abs(residuals[0]) - 0.01;
    residuals[1] = std::abs(residuals[1]) + 0.01;
    const double sigma = 0.2 + rng.uniform01();
    const double q = 0.2 + 0.6 * rng.uniform01();
    const auto side = solve_side_constants(residuals, gamma, sigma, q);
    if (!side.constrained) {
      continue;
    }
    ++feasible;
    double mass = 0.0;
    double quant = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = residuals[i] <= 0.0 ? side.w_neg : side.w_pos;
      mass += w * gamma[i];
      quant += w * gamma[i] * normal_cdf(-residuals[i] / sigma);
    }
    CHECK(std::abs(mass - 1.0) < 1e-10);
    CHECK(std::abs(quant - q) < 1e-10);
  }
  CHECK(feasible >= 50);
}

TEST_CASE("solve_side_constants falls back when the constraint is infeasible")
{
  SUBCASE("one-sided residuals")
  {
    Eigen::VectorXd residuals(3);
    residuals << 0.5, 1.0, 2.0;
    WarningLog warnings;
    const auto side =
      solve_side_constants(residuals, Eigen::VectorXd::Ones(3), 0.4, 0.5, &warnings, "alpha");
    CHECK_FALSE(side.constrained);
    CHECK(side.w_neg == doctest::Approx(1.0 / 3.0));
    CHECK(side.w_pos == doctest::Approx(1.0 / 3.0));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == "one-sided-residuals");
    CHECK(warnings[0].message.find("alpha") != std::string::npos);
  }
  SUBCASE("a zero residual counts as the nonpositive side")
  {
    Eigen::VectorXd residuals(1);
    residuals << 0.0;
    WarningLog warnings;
    const auto side = solve_side_constants(residuals, Eigen::VectorXd::Ones(1), 1.0, 0.5, &warnings);
    CHECK_FALSE(side.constrained); // positive side empty
    CHECK(warnings.size() == 1);
  }
  SUBCASE("negative solution component")
  {
    Eigen::VectorXd residuals(2);
    residuals << -0.001, 10.0;
    WarningLog warnings;
    const auto side =
      solve_side_constants(residuals, Eigen::VectorXd::Ones(2), 0.1, 0.9, &warnings);
    CHECK_FALSE(side.constrained);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == "negative-side-constant");
  }
}

TEST_CASE("solve_side_constants scale behavior in gamma")
{
  Rng rng(606);
  const MqeEmission base = random_feasible_emission(rng, 0.7);
  const double gamma_sum = base.gamma_weights.sum();
  const auto scaled = solve_side_constants(base.residuals, 11.5 * base.gamma_weights,
                                           base.bandwidth, base.q);
  // The products W_l * sum(gamma) entering the PDF are scale-free.
  CHECK(scaled.w_neg * 11.5 * gamma_sum ==
        doctest::Approx(base.w_neg * gamma_sum).epsilon(1e-10));
  CHECK(scaled.w_pos * 11.5 * gamma_sum ==
        doctest::Approx(base.w_pos * gamma_sum).epsilon(1e-10));
}

TEST_CASE("emission_pdf on the symmetric two-point case")
{
  Eigen::VectorXd residuals(2);
  residuals << -1.0, 1.0;
  const MqeEmission e = build_emission(residuals, Eigen::VectorXd::Ones(2), 1.0, 0.5);
  REQUIRE(e.constrained);
  CHECK(e.w_neg == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(emission_pdf(e, 0.0) == doctest::Approx(0.2419707245).epsilon(1e-9));
}

TEST_CASE("emission_pdf matches a direct summation oracle")
{
  Rng rng(8181);
  const MqeEmission e = random_feasible_emission(rng, 0.6);
  for (int i = 0; i < 20; ++i) {
    const double eps = 6.0 * (rng.uniform01() - 0.5);
    long double acc = 0.0L;
    for (Eigen::Index t = 0; t < e.residuals.size(); ++t) {
      const long double w = e.residuals[t] <= 0.0 ? e.w_neg : e.w_pos;
      const long double z = (static_cast<long double>(eps) - e.residuals[t]) / e.bandwidth;
      acc += w * e.gamma_weights[t] * std::exp(-0.5L * z * z);
    }
    acc /= e.bandwidth * std::sqrt(2.0L * 3.14159265358979323846L);
    CHECK(emission_pdf(e, eps) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-12));
    CHECK(emission_pdf_batch(e, Eigen::VectorXd::Constant(1, eps))[0] ==
          doctest::Approx(emission_pdf(e, eps)).epsilon(1e-14));
  }
}

TEST_CASE("emission_cdf limits, constraint, monotonicity and quadrature")
{
  Rng rng(314159);
  for (double q : { 0.1, 0.5, 0.9 }) {
    const MqeEmission e = random_feasible_emission(rng, q);
    const double lo = e.residuals.minCoeff() - 20.0 * e.bandwidth;
    const double hi = e.residuals.maxCoeff() + 20.0 * e.bandwidth;

    CHECK(emission_cdf(e, lo) < 1e-12);
    CHECK(emission_cdf(e, hi) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(emission_cdf(e, 0.0) == doctest::Approx(q).epsilon(1e-6));

    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
      const double x = lo + (hi - lo) * i / 50.0;
      const double c = emission_cdf(e, x);
      CHECK(c >= prev);
      prev = c;
    }

    const double at = 0.3;
    const double quad =
      oracle::quadrature([&](double u) { return emission_pdf(e, u); }, lo, at, 1e-12);
    CHECK(emission_cdf(e, at) == doctest::Approx(quad).epsilon(1e-8));

    const double total =
      oracle::quadrature([&](double u) { return emission_pdf(e, u); }, lo, hi, 1e-10);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

    const double h = 1e-5;
    const double fd = (emission_cdf(e, at + h) - emission_cdf(e, at - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(emission_pdf(e, at)).epsilon(1e-6));
  }
}

TEST_CASE("equal side constants under exact symmetry at q = 1/2")
{
  Eigen::VectorXd residuals(6);
  residuals << -2.1, -1.0, -0.2, 0.2, 1.0, 2.1;
  Eigen::VectorXd gamma(6);
  gamma << 0.3, 0.8, 1.2, 1.2, 0.8, 0.3;
  const auto side = solve_side_constants(residuals, gamma, 0.7, 0.5);
  REQUIRE(side.constrained);
  CHECK(std::abs(side.w_neg - side.w_pos) < 1e-12);
}
