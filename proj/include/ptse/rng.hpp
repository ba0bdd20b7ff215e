#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace ptse {

//! splitmix64 step; used to derive independent streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
  return mix_seed(mix_seed(a, b), c);
}

//! FNV-1a; stable hash for keying RNG streams by member label.
inline std::uint64_t fnv1a64(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

//! Deterministic draws on top of mt19937_64. The distributions are coded
//! out by hand because the standard library's are implementation-defined;
//! this keeps results reproducible across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  //! Uniform on the open interval (0, 1).
  double uniform01()
  {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal()
  {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  //! Index drawn with probability proportional to `weights` (all >= 0).
  Eigen::Index categorical(const Eigen::VectorXd& weights)
  {
    const double target = uniform01() * weights.sum();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (target <= acc) {
        return i;
      }
    }
    return weights.size() - 1;
  }

  //! Index drawn from a precomputed cumulative-sum vector.
  Eigen::Index categorical_from_cumulative(const Eigen::VectorXd& cumulative)
  {
    const double target = uniform01() * cumulative[cumulative.size() - 1];
    const double* begin = cumulative.data();
    const double* end = begin + cumulative.size();
    const double* it = std::lower_bound(begin, end, target);
    return std::min<Eigen::Index>(it - begin, cumulative.size() - 1);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace ptse
