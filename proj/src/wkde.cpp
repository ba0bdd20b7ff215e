#include "ptse/wkde.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ptse/errors.hpp"
#include "ptse/math.hpp"
#include "ptse/rng.hpp"

namespace ptse {

namespace {

constexpr int kBimseGridSize = 512;

double trapezoid(const Eigen::VectorXd& y, double h)
{
  const Eigen::Index n = y.size();
  return h * (y.sum() - 0.5 * (y[0] + y[n - 1]));
}

} // namespace

WeightedSample::WeightedSample(Eigen::VectorXd values_in, Eigen::VectorXd weights_in)
  : values(std::move(values_in))
  , weights(std::move(weights_in))
{
  if (values.size() < 1 || values.size() != weights.size()) {
    throw InvalidArgument("weighted sample needs matching nonempty values and weights");
  }
  if (!values.allFinite()) {
    throw InvalidArgument("weighted sample values must be finite");
  }
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw InvalidArgument("weighted sample weights must be strictly positive and finite");
  }
}

KdeModel::KdeModel(WeightedSample sample_in, double bandwidth_in)
  : sample(std::move(sample_in))
  , bandwidth(bandwidth_in)
{
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("bandwidth must be positive and finite");
  }
}

double kde_pdf(const KdeModel& model, double y)
{
  const auto& v = model.sample.values.array();
  const auto& w = model.sample.weights.array();
  const double sigma = model.bandwidth;
  const double acc = (w * (-0.5 * ((y - v) / sigma).square()).exp()).sum();
  return kInvSqrt2Pi * acc / (sigma * w.sum());
}

double kde_cdf(const KdeModel& model, double y)
{
  const auto& v = model.sample.values;
  const auto& w = model.sample.weights;
  const double sigma = model.bandwidth;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc += w[i] * normal_cdf((y - v[i]) / sigma);
  }
  return acc / w.sum();
}

Eigen::VectorXd kde_pdf_grid(const Eigen::VectorXd& values,
                             const Eigen::VectorXd& weights,
                             double bandwidth,
                             const Eigen::VectorXd& grid)
{
  const double norm = kInvSqrt2Pi / (bandwidth * weights.sum());
  Eigen::VectorXd out(grid.size());
  const auto v = values.array();
  const auto w = weights.array();
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    out[g] = norm * (w * (-0.5 * ((grid[g] - v) / bandwidth).square()).exp()).sum();
  }
  return out;
}

double silverman_bandwidth(const WeightedSample& sample)
{
  const auto& v = sample.values.array();
  const auto& w = sample.weights.array();
  const double w_sum = w.sum();
  const double n_eff = w_sum * w_sum / (w * w).sum();
  const double mean = (w * v).sum() / w_sum;
  const double var = (w * (v - mean).square()).sum() / w_sum;
  return 1.06 * std::sqrt(var) * std::pow(n_eff, -0.2);
}

Eigen::VectorXd default_bandwidth_candidates(double pilot,
                                             int count,
                                             double lo_factor,
                                             double hi_factor)
{
  if (count < 1 || !(pilot > 0.0) || !(lo_factor > 0.0) || !(hi_factor >= lo_factor)) {
    throw InvalidArgument("bad candidate grid specification");
  }
  if (count == 1) {
    return Eigen::VectorXd::Constant(1, pilot);
  }
  const double lo = std::log(pilot * lo_factor);
  const double hi = std::log(pilot * hi_factor);
  return Eigen::VectorXd::LinSpaced(count, lo, hi).array().exp();
}

BandwidthSelection select_bandwidth(const WeightedSample& sample,
                                    const Eigen::VectorXd& candidates,
                                    int bootstrap_b,
                                    std::uint64_t rng_seed,
                                    WarningLog* warnings)
{
  if (candidates.size() == 0) {
    throw EmptyCandidates("bandwidth candidate set is empty");
  }
  for (Eigen::Index i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i] > 0.0) || !std::isfinite(candidates[i])) {
      throw InvalidArgument("bandwidth candidates must be positive and finite");
    }
    if (i > 0 && candidates[i] < candidates[i - 1]) {
      throw InvalidArgument("bandwidth candidates must be sorted ascending");
    }
  }
  if (bootstrap_b < 1) {
    throw InvalidArgument("bootstrap resample count must be >= 1");
  }
  const Eigen::Index n = sample.values.size();
  if (n < 2) {
    throw InvalidArgument("bandwidth selection needs at least 2 sample values");
  }

  BandwidthSelection sel;
  sel.scores = Eigen::VectorXd::Constant(candidates.size(),
                                         std::numeric_limits<double>::quiet_NaN());

  if (sample.values.maxCoeff() == sample.values.minCoeff()) {
    warn(warnings, "degenerate-sample",
         "all sample values identical; returning the smallest candidate bandwidth");
    sel.sigma_star = candidates[0];
    sel.pilot = 0.0;
    return sel;
  }

  const double pilot = silverman_bandwidth(sample);
  sel.pilot = pilot;

  // Smoothed bootstrap from the pilot KDE: index proportional to weight,
  // then Gaussian noise at the pilot bandwidth. All resamples are drawn
  // up front so scoring order cannot affect the stream.
  Rng rng(mix_seed(rng_seed, 0x77bde5u));
  Eigen::VectorXd cumulative(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += sample.weights[i];
    cumulative[i] = acc;
  }
  std::vector<Eigen::VectorXd> resamples;
  resamples.reserve(static_cast<std::size_t>(bootstrap_b));
  for (int b = 0; b < bootstrap_b; ++b) {
    Eigen::VectorXd rs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index idx = rng.categorical_from_cumulative(cumulative);
      rs[i] = sample.values[idx] + pilot * rng.normal();
    }
    resamples.push_back(std::move(rs));
  }

  const double sigma_max = candidates[candidates.size() - 1];
  const double lo = sample.values.minCoeff() - 4.0 * sigma_max;
  const double hi = sample.values.maxCoeff() + 4.0 * sigma_max;
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(kBimseGridSize, lo, hi);
  const double h = (hi - lo) / static_cast<double>(kBimseGridSize - 1);

  const Eigen::VectorXd pilot_density = kde_pdf_grid(sample.values, sample.weights, pilot, grid);
  const Eigen::VectorXd uniform_weights = Eigen::VectorXd::Ones(n);

  Eigen::Index best = 0;
  for (Eigen::Index c = 0; c < candidates.size(); ++c) {
    double total = 0.0;
    for (const Eigen::VectorXd& rs : resamples) {
      const Eigen::VectorXd dens = kde_pdf_grid(rs, uniform_weights, candidates[c], grid);
      total += trapezoid((dens - pilot_density).array().square().matrix(), h);
    }
    sel.scores[c] = total / static_cast<double>(bootstrap_b);
    if (sel.scores[c] < sel.scores[best]) {
      best = c;
    }
  }
  sel.sigma_star = candidates[best];
  return sel;
}

} // namespace ptse
