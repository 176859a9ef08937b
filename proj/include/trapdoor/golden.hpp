#pragma once

#include <array>
#include <string>
#include <vector>

#include "trapdoor/dp.hpp"

namespace trapdoor::golden {

/// Constants of the closed-form solution, all derived from sqrt(5).
struct GoldenConstants {
  double phi;  // (1 + sqrt5) / 2
  double rho;  // log2(phi), the optimal average reward in bits
  double b1;   // sqrt5 - 2
  double b2;   // (3 - sqrt5) / 2
  double b3;   // (sqrt5 - 1) / 2
  double b4;   // 3 - sqrt5
  double c1;   // log2(3 - sqrt5)
  double c2;   // log2(sqrt5 - 1)

  std::array<double, 4> recurrent_beliefs() const { return {b1, b2, b3, b4}; }
};

const GoldenConstants& constants();

/// Conjectured optimal action on [b1, b4]; throws std::domain_error outside.
dp::ActionPair conjectured_policy(double z);

/// Closed-form differential value on [b1, b4]; throws std::domain_error
/// outside (see h_extended).
double h_tilde(double z);

/// Smallest concave extension of h_tilde to [0, 1]: linear beyond b1 and b4
/// with the one-sided slopes of h_tilde there.
double h_extended(double z);

/// One-sided derivative of h_tilde at b4 from the left (analytically -1).
double extension_slope_right();

/// Entropy rate H(p)/(1+p) of the two-state chain that forbids "11".
double markov_entropy_rate(double p);

struct IterationRecord {
  int iteration = 0;  // k of h_k
  /// max |h_k - h_tilde| over grid points in [b1,b4] and at b1..b4 exactly.
  double fixed_point_deviation = 0.0;
  /// max over the grid of h_k - h_{k-1}; 0 for k = 0.
  double max_increase = 0.0;
  /// sup-norm of h_k - h_{k-1}; 0 for k = 0.
  double sup_difference = 0.0;
};

struct FixedPointOptions {
  int grid_size = 4001;
  int action_grid = 8001;
  int iterations = 30;
  /// Shift subtracted each iteration. Defaults to log2(phi); overriding it is
  /// a negative control.
  double rho = 0.0;
  bool override_rho = false;
  unsigned threads = 0;
  bool keep_iterates = false;
};

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct FixedPointReport {
  int grid_size = 0;
  int action_grid = 0;
  int iterations = 0;
  double grid_spacing = 0.0;
  double rho_used = 0.0;
  /// |rho_used - log2(phi)|.
  double rho_error = 0.0;
  std::vector<IterationRecord> records;
  /// max |T h_final - rho - h_tilde| over [b1,b4].
  double bellman_residual = 0.0;
  /// max |T h_final - rho - h_final| over [b1,b4].
  double self_residual = 0.0;
  /// Argmax of the Bellman right-hand side at z = b2 for h_final.
  dp::ActionPair argmax_at_b2;
  double argmax_at_b2_error = 0.0;
  std::vector<Check> checks;
  /// h_0..h_final when requested.
  std::vector<dp::ValueFunction> iterates;

  bool passed() const;
};

/// Tolerance for residual and deviation checks at a given grid size:
/// 1e-4 at 4001 points, scaling with the square of the grid spacing for
/// coarser grids.
double residual_tolerance(int grid_size);

/// Runs h_{k+1} = T h_k - rho from h_0 = h_extended on the grid and
/// measures how closely the Bellman equation holds on [b1, b4].
FixedPointReport verify_fixed_point(const FixedPointOptions& opt);

struct ChainTransition {
  int from = 0;  // index into {b1..b4}
  Bit output = Bit::kZero;
  double probability = 0.0;
  double successor = 0.0;
  int to = -1;  // -1 when the successor is not one of b1..b4
};

struct StationaryReport {
  std::vector<ChainTransition> transitions;
  bool closed = false;
  std::array<std::array<double, 4>, 4> matrix{};
  std::array<double, 4> stationary{};
  std::array<double, 4> rewards{};
  double expected_reward = 0.0;
  double reward_error = 0.0;
  bool irreducible_aperiodic = false;
  std::vector<Check> checks;

  bool passed() const;
};

/// Builds the chain on {b1..b4} induced by the conjectured policy and checks
/// closure, primitivity and the stationary expected reward.
StationaryReport stationary_check();

}  // namespace trapdoor::golden
