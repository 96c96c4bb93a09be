#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "core/errors.hpp"

namespace digmm {

// All random draws in the library come from explicitly seeded mt19937_64
// streams; each consumer owns its stream, so results are reproducible
// bit-for-bit for a given seed.
using Rng = std::mt19937_64;

// SplitMix64 step, used to decorrelate seeds derived from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent-looking substream for (seed, index), e.g. one per EM restart.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ (index + 1)));
}

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(sum_j exp(t_j)) computed against the running maximum so that widely
// scaled terms cannot overflow; an all-(-inf) input yields -inf, never NaN.
inline double log_sum_exp(const Eigen::VectorXd& t) {
  const double m = t.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf propagates)
  double s = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) s += std::exp(t[j] - m);
  return m + std::log(s);
}

inline bool all_finite(const Eigen::MatrixXd& m) {
  return m.allFinite();
}

// Largest absolute asymmetry |A - A^T| relative to max(1, |A|_maxabs).
inline double relative_asymmetry(const Eigen::MatrixXd& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

// Draws an index with probability proportional to weights[i] using one
// uniform variate (cumulative walk; the last index absorbs rounding).
inline Eigen::Index pick_weighted(const Eigen::VectorXd& weights, Rng& rng) {
  require(weights.size() > 0, errc::invalid_argument,
          "pick_weighted requires a non-empty weight list");
  const double total = weights.sum();
  require(total > 0.0 && std::isfinite(total), errc::invalid_argument,
          "pick_weighted requires positive finite total weight");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng) * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

// Empirical quantile with linear interpolation between order statistics
// (the common "linear" definition: index h = q*(n-1)).
inline double quantile(std::vector<double> values, double q) {
  require(!values.empty(), errc::invalid_argument,
          "quantile requires a non-empty sample");
  require(q >= 0.0 && q <= 1.0, errc::invalid_argument,
          "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace digmm
