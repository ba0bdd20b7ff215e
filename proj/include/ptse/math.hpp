#pragma once

#include <cmath>
#include <numbers>

namespace ptse {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

//! Standard normal density.
inline double normal_pdf(double z)
{
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

//! Standard normal CDF, accurate in both tails.
inline double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace ptse
