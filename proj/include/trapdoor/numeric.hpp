#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace trapdoor {

/// Base-2 binary entropy with 0 log 0 = 0; zero outside (0, 1).
inline double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

/// Result of a one-dimensional maximization.
struct Maximum1d {
  double x;
  double value;
};

/**
 * Golden-section search for the maximum of a unimodal function on [lo, hi].
 *
 * Stops when the bracket is narrower than `tol` (absolute). The endpoints are
 * evaluated too, so maxima sitting on the boundary of the interval are found
 * exactly.
 */
template <class F>
Maximum1d golden_section_maximize(F&& f, double lo, double hi,
                                  double tol = 1e-12, int max_iter = 200) {
  if (!(hi > lo)) return {lo, f(lo)};
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Maximum1d best = fc >= fd ? Maximum1d{c, fc} : Maximum1d{d, fd};
  const double f_lo = f(lo);
  if (f_lo > best.value) best = {lo, f_lo};
  const double f_hi = f(hi);
  if (f_hi > best.value) best = {hi, f_hi};
  return best;
}

/// SplitMix64 finalizer. Used to derive independent seeds from one root.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under root seed `root`:
/// splitmix64(root ^ splitmix64(index)).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ splitmix64(index));
}

}  // namespace trapdoor
