#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "trapdoor/channel.hpp"
#include "trapdoor/numeric.hpp"

namespace trapdoor::dp {

/// Posterior over channel states given the output history, one entry per
/// state. Nonnegative and summing to one.
using BeliefVector = std::vector<double>;

/// Stochastic matrix u(s, x) = p(x | s): rows are channel states, columns
/// are input symbols.
class ActionMatrix {
 public:
  /// Throws std::invalid_argument if any row is not a distribution.
  ActionMatrix(int states, int inputs, std::vector<double> entries);

  /// 2x2 matrix for the trapdoor channel from p(x=0|s=0) and p(x=1|s=1).
  static ActionMatrix binary(double stay_given_zero, double stay_given_one);

  int states() const { return states_; }
  int inputs() const { return inputs_; }
  double operator()(int s, int x) const { return entries_[s * inputs_ + x]; }

 private:
  int states_;
  int inputs_;
  std::vector<double> entries_;
};

/**
 * Input policy for the scalar trapdoor belief z, reparametrized as
 * delta = z * p(x=0|s=0) and gamma = (1-z) * p(x=1|s=1).
 * Feasible for z when 0 <= delta <= z and 0 <= gamma <= 1-z.
 */
struct ActionPair {
  double delta = 0.0;
  double gamma = 0.0;
};

inline bool operator==(const ActionPair& a, const ActionPair& b) {
  return a.delta == b.delta && a.gamma == b.gamma;
}

bool is_feasible(double z, ActionPair a, double tol = 1e-12);

/// A unifilar finite-state channel: output law p(y|x,s) and the
/// deterministic state map s' = f(s, x, y).
struct UnifilarModel {
  int states = 0;
  int inputs = 0;
  int outputs = 0;
  std::function<double(int x, int s, int y)> output_prob;
  std::function<int(int s, int x, int y)> next_state;
};

UnifilarModel trapdoor_model();

/// Posterior over the next channel state after observing y, for any unifilar
/// channel. Throws std::domain_error if y has probability zero.
BeliefVector belief_update(const UnifilarModel& model, const BeliefVector& beta,
                           const ActionMatrix& u, int y);

/// Trapdoor-channel specialization of belief_update.
BeliefVector belief_update(const BeliefVector& beta, const ActionMatrix& u,
                           Bit y);

ActionPair action_pair_from_matrix(double z, const ActionMatrix& u);

/// Inverse of action_pair_from_matrix. Only defined for z in (0, 1); throws
/// std::domain_error at the boundary where one row of u is unidentifiable.
ActionMatrix matrix_from_action_pair(double z, ActionPair a);

/// P(w | z, a): (1+delta-gamma)/2 for w = 0 and (1-delta+gamma)/2 for w = 1.
double disturbance_prob(double z, ActionPair a, Bit w);

/// Next belief: 2 delta/(1+delta-gamma) on w = 0, 1 - 2 gamma/(1-delta+gamma)
/// on w = 1. Throws std::domain_error when w has probability zero.
double transition_z(double z, ActionPair a, Bit w);

/// One-step reward I(X,S;Y) in bits: H(1/2 + (delta-gamma)/2) + delta + gamma - 1.
double reward(double z, ActionPair a);

/// Reward without the feasibility check, for inner loops.
inline double reward_unchecked(ActionPair a) {
  return binary_entropy(0.5 + 0.5 * (a.delta - a.gamma)) + a.delta + a.gamma -
         1.0;
}

/// Piecewise-linear function on a uniform grid of `grid_size` points that
/// covers [0, 1] including both endpoints.
class ValueFunction {
 public:
  /// Throws std::invalid_argument for fewer than two points or non-finite
  /// values.
  explicit ValueFunction(std::vector<double> values);

  static ValueFunction zeros(int grid_size);

  /// Samples f at every grid point.
  template <class F>
  static ValueFunction sample(int grid_size, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(std::max(grid_size, 0)));
    for (int i = 0; i < grid_size; ++i) v[i] = f(grid_point(i, grid_size));
    return ValueFunction(std::move(v));
  }

  static double grid_point(int i, int grid_size) {
    return static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }

  int grid_size() const { return static_cast<int>(values_.size()); }
  double spacing() const { return 1.0 / (grid_size() - 1); }
  double z(int i) const { return grid_point(i, grid_size()); }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  /// Linear interpolation; z is clamped to [0, 1].
  double operator()(double z) const {
    const int last = grid_size() - 1;
    const double s = std::clamp(z, 0.0, 1.0) * last;
    const int i = std::min(static_cast<int>(s), last - 1);
    const double t = s - i;
    return values_[i] + t * (values_[i + 1] - values_[i]);
  }

 private:
  std::vector<double> values_;
};

/// Greedy action per grid point of a value grid.
class PolicyTable {
 public:
  explicit PolicyTable(std::vector<ActionPair> actions);

  int grid_size() const { return static_cast<int>(actions_.size()); }
  double z(int i) const { return ValueFunction::grid_point(i, grid_size()); }
  const ActionPair& operator[](int i) const { return actions_[i]; }
  const std::vector<ActionPair>& actions() const { return actions_; }

  /// Linear interpolation between the neighbouring grid actions. The result
  /// is feasible for z because feasibility is preserved under interpolation.
  ActionPair operator()(double z) const;

 private:
  std::vector<ActionPair> actions_;
};

/**
 * The expression maximized by the Bellman operator:
 *   f(delta, gamma) = reward + sum_w P(w) h(F(z, a, w)).
 * It does not depend on z once the action pair is fixed.
 */
template <class H>
double bellman_integrand(const H& h, ActionPair a) {
  const double p0 = 0.5 * (1.0 + a.delta - a.gamma);
  const double p1 = 0.5 * (1.0 - a.delta + a.gamma);
  double v = binary_entropy(p0) + a.delta + a.gamma - 1.0;
  if (p0 > 0.0) v += p0 * h(std::clamp(a.delta / p0, 0.0, 1.0));
  if (p1 > 0.0) v += p1 * h(std::clamp(1.0 - a.gamma / p1, 0.0, 1.0));
  return v;
}

struct SearchOptions {
  enum class Mode {
    /// Binary search over the grid, valid for concave objectives.
    kConcave,
    /// Every grid pair. Reference implementation for small grids.
    kExhaustive,
  };

  /// Points of the uniform action grid over [0, 1].
  int action_grid = 4000;
  Mode mode = Mode::kConcave;
  /// Continuous golden-section polish around the grid argmax.
  bool refine = true;
  double refine_tol = 1e-12;
};

struct RectangleMax {
  double value = -std::numeric_limits<double>::infinity();
  ActionPair best;
};

namespace detail {

/// Grid candidates in [0, upper]: the action-grid points below `upper`
/// followed by `upper` itself.
class Candidates {
 public:
  Candidates(double upper, int action_grid)
      : upper_(upper), step_(1.0 / (action_grid - 1)) {
    const double s = upper * (action_grid - 1);
    int m = static_cast<int>(s + 1e-9);
    if (m > action_grid - 1) m = action_grid - 1;
    // If grid point m coincides with `upper`, `upper` replaces it.
    const bool on_grid = std::abs(m * step_ - upper) <= 1e-12;
    count_ = on_grid ? m + 1 : m + 2;
  }
  int size() const { return count_; }
  double operator[](int k) const {
    return k == count_ - 1 ? upper_ : k * step_;
  }

 private:
  double upper_;
  double step_;
  int count_ = 1;
};

/// Smallest index of the maximum of a unimodal sequence.
template <class F>
int unimodal_argmax(int n, F&& f) {
  int lo = 0, hi = n - 1;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (f(mid + 1) > f(mid))
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail

/**
 * Maximizes f(delta, gamma) over [0, delta_max] x [0, gamma_max].
 *
 * The grid phase searches the action grid restricted to the rectangle, with
 * the rectangle's upper corners added as candidates. Ties go to the smallest
 * delta, then the smallest gamma. With `refine`, a golden-section search over
 * delta, nested around a full-range golden-section search over gamma,
 * polishes the grid argmax; the refined point replaces it only if strictly
 * better.
 */
template <class F>
RectangleMax maximize_on_rectangle(F&& f, double delta_max, double gamma_max,
                                   const SearchOptions& opt) {
  const detail::Candidates ds(delta_max, opt.action_grid);
  const detail::Candidates gs(gamma_max, opt.action_grid);
  RectangleMax out;
  int best_i = 0;

  if (opt.mode == SearchOptions::Mode::kExhaustive) {
    for (int i = 0; i < ds.size(); ++i) {
      for (int j = 0; j < gs.size(); ++j) {
        const double v = f(ds[i], gs[j]);
        if (v > out.value) {
          out = {v, {ds[i], gs[j]}};
          best_i = i;
        }
      }
    }
  } else {
    auto inner = [&](int i) {
      const double d = ds[i];
      const int j = detail::unimodal_argmax(
          gs.size(), [&](int k) { return f(d, gs[k]); });
      return RectangleMax{f(d, gs[j]), {d, gs[j]}};
    };
    best_i = detail::unimodal_argmax(
        ds.size(), [&](int i) { return inner(i).value; });
    out = inner(best_i);
  }

  if (opt.refine && (delta_max > 0.0 || gamma_max > 0.0)) {
    auto best_gamma = [&](double d) {
      return golden_section_maximize([&](double g) { return f(d, g); }, 0.0,
                                     gamma_max, opt.refine_tol);
    };
    // The grid argmax can sit a few cells from the continuous one, so climb
    // the concave profile max_gamma f(delta, .) over the delta candidates
    // before bracketing.
    auto profile = [&](int i) { return best_gamma(ds[i]).value; };
    int i = best_i;
    double fi = profile(i);
    for (double fn; i + 1 < ds.size() && (fn = profile(i + 1)) > fi; ++i) fi = fn;
    if (i == best_i)
      for (double fp; i > 0 && (fp = profile(i - 1)) > fi; --i) fi = fp;
    const double lo = ds[std::max(i - 1, 0)];
    const double hi = ds[std::min(i + 1, ds.size() - 1)];
    const Maximum1d d_star = golden_section_maximize(
        [&](double d) { return best_gamma(d).value; }, lo, hi, opt.refine_tol);
    const Maximum1d g_star = best_gamma(d_star.x);
    const double v = f(d_star.x, g_star.x);
    if (v > out.value) out = {v, {d_star.x, g_star.x}};
  }
  return out;
}

/// (T h)(z) and a maximizing action for any callable value function h.
template <class H>
RectangleMax bellman_apply(const H& h, double z, const SearchOptions& opt) {
  return maximize_on_rectangle(
      [&](double d, double g) { return bellman_integrand(h, {d, g}); }, z,
      1.0 - z, opt);
}

/// Default search with the given action grid.
RectangleMax bellman_apply(const ValueFunction& h, double z, int action_grid);

struct SweepResult {
  ValueFunction value;
  PolicyTable policy;
};

/// T applied at every grid point of h. Grid points are independent, and
/// the output is identical for every thread count.
SweepResult bellman_sweep(const ValueFunction& h, const SearchOptions& opt,
                          unsigned threads = 0);

struct ValueIterationResult {
  ValueFunction value;
  /// Greedy with respect to `value`, i.e. the argmax of T applied to it.
  PolicyTable policy;
};

/// J_{k+1} = T J_k from J_0 = 0, `iterations` times.
ValueIterationResult value_iteration(int grid_size, const SearchOptions& opt,
                                     int iterations, unsigned threads = 0);

ValueIterationResult value_iteration(int grid_size, int action_grid,
                                     int iterations);

/// Stationary policy on beliefs.
using Policy = std::function<ActionPair(double)>;

/// Bin of z on a grid of `bins` points: the nearest grid point.
int histogram_bin(double z, int bins);

struct ChainResult {
  std::size_t steps = 0;
  /// Mean per-step reward; NaN when steps == 0.
  double avg_reward = std::numeric_limits<double>::quiet_NaN();
  /// Batch-means standard error of avg_reward (100 batches); NaN if fewer
  /// than 100 steps.
  double std_error = std::numeric_limits<double>::quiet_NaN();
  /// Visit frequency per bin, summing to 1 (all zero when steps == 0).
  std::vector<double> histogram;
  double final_z = 0.0;
};

/// Runs the belief chain: w ~ P(.|z, a), z <- F(z, a, w), recording the
/// reward and the bin of each visited z (including z0).
ChainResult simulate_belief_chain(const Policy& policy, double z0,
                                  std::size_t steps, Rng& rng, int bins);

ChainResult simulate_belief_chain(const PolicyTable& policy, double z0,
                                  std::size_t steps, Rng& rng);

}  // namespace trapdoor::dp
