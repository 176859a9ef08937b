#pragma once

// Oracles and generators shared by the unit and acceptance tests. Nothing
// here calls into the library's search code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "trapdoor/channel.hpp"
#include "trapdoor/dp.hpp"

namespace testing {

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

inline double max_second_difference(const std::vector<double>& v) {
  double worst = -INFINITY;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    worst = std::max(worst, v[i - 1] - 2 * v[i] + v[i + 1]);
  return worst;
}

/// Random concave piecewise-linear values on a uniform grid: cumulative sums
/// of sorted decreasing slopes plus an offset.
inline std::vector<double> random_concave(trapdoor::Rng& rng, int n) {
  std::vector<double> slopes(n - 1);
  const double scale = 0.5 + 2.0 * trapdoor::uniform01(rng);
  for (double& s : slopes) s = scale * (2.0 * trapdoor::uniform01(rng) - 1.0);
  std::sort(slopes.begin(), slopes.end(), std::greater<>());
  std::vector<double> v(n);
  v[0] = trapdoor::uniform01(rng);
  const double dz = 1.0 / (n - 1);
  for (int i = 1; i < n; ++i) v[i] = v[i - 1] + slopes[i - 1] * dz;
  return v;
}

inline std::vector<double> symmetrized(const std::vector<double>& v) {
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    s[i] = 0.5 * (v[i] + v[v.size() - 1 - i]);
  return s;
}

/// Bellman right-hand side evaluated without library helpers.
template <class H>
double bellman_rhs(const H& h, double d, double g) {
  const double p0 = 0.5 * (1 + d - g);
  const double p1 = 1 - p0;
  double v = h2(p0) + d + g - 1;
  if (p0 > 0) v += p0 * h(2 * d / (1 + d - g));
  if (p1 > 0) v += p1 * h(1 - 2 * g / (1 - d + g));
  return v;
}

/// Brute-force rectangle maximum over an n x n grid of [0,dmax] x [0,gmax].
template <class F>
double brute_force_max(F&& f, double dmax, double gmax, int n) {
  double best = -INFINITY;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      best = std::max(best, f(dmax * i / (n - 1), gmax * j / (n - 1)));
  return best;
}

}  // namespace testing
