#include "trapdoor/dp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trapdoor/parallel.hpp"

namespace trapdoor::dp {

namespace {

void require_belief(double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("belief must lie in [0,1], got " +
                                std::to_string(z));
}

void require_feasible(double z, ActionPair a) {
  require_belief(z);
  if (!is_feasible(z, a))
    throw std::invalid_argument(
        "action pair (" + std::to_string(a.delta) + ", " +
        std::to_string(a.gamma) + ") infeasible for z = " + std::to_string(z));
}

}  // namespace

ActionMatrix::ActionMatrix(int states, int inputs, std::vector<double> entries)
    : states_(states), inputs_(inputs), entries_(std::move(entries)) {
  if (states <= 0 || inputs <= 0 ||
      entries_.size() != static_cast<std::size_t>(states * inputs))
    throw std::invalid_argument("action matrix shape mismatch");
  for (int s = 0; s < states; ++s) {
    double sum = 0.0;
    for (int x = 0; x < inputs; ++x) {
      const double p = (*this)(s, x);
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("action matrix entry outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("action matrix row " + std::to_string(s) +
                                  " does not sum to 1");
  }
}

ActionMatrix ActionMatrix::binary(double stay_given_zero,
                                  double stay_given_one) {
  return ActionMatrix(2, 2,
                      {stay_given_zero, 1.0 - stay_given_zero,
                       1.0 - stay_given_one, stay_given_one});
}

bool is_feasible(double z, ActionPair a, double tol) {
  return a.delta >= -tol && a.delta <= z + tol && a.gamma >= -tol &&
         a.gamma <= 1.0 - z + tol;
}

UnifilarModel trapdoor_model() {
  UnifilarModel m;
  m.states = 2;
  m.inputs = 2;
  m.outputs = 2;
  m.output_prob = [](int x, int s, int y) {
    return channel::output_prob(bit_from_int(x), bit_from_int(s),
                                bit_from_int(y));
  };
  m.next_state = [](int s, int x, int y) {
    return to_int(channel::next_state(bit_from_int(s), bit_from_int(x),
                                      bit_from_int(y)));
  };
  return m;
}

BeliefVector belief_update(const UnifilarModel& model, const BeliefVector& beta,
                           const ActionMatrix& u, int y) {
  if (static_cast<int>(beta.size()) != model.states ||
      u.states() != model.states || u.inputs() != model.inputs)
    throw std::invalid_argument("belief/action dimensions do not match model");
  BeliefVector next(model.states, 0.0);
  double total = 0.0;
  for (int s = 0; s < model.states; ++s) {
    for (int x = 0; x < model.inputs; ++x) {
      const double w = beta[s] * u(s, x) * model.output_prob(x, s, y);
      if (w <= 0.0) continue;
      next[model.next_state(s, x, y)] += w;
      total += w;
    }
  }
  if (!(total > 0.0))
    throw std::domain_error("impossible observation: output " +
                            std::to_string(y) + " has probability zero");
  for (double& p : next) p /= total;
  return next;
}

BeliefVector belief_update(const BeliefVector& beta, const ActionMatrix& u,
                           Bit y) {
  static const UnifilarModel model = trapdoor_model();
  return belief_update(model, beta, u, to_int(y));
}

ActionPair action_pair_from_matrix(double z, const ActionMatrix& u) {
  require_belief(z);
  if (u.states() != 2 || u.inputs() != 2)
    throw std::invalid_argument("trapdoor action matrix must be 2x2");
  return {z * u(0, 0), (1.0 - z) * u(1, 1)};
}

ActionMatrix matrix_from_action_pair(double z, ActionPair a) {
  require_feasible(z, a);
  if (z <= 0.0 || z >= 1.0)
    throw std::domain_error("action matrix is not identifiable at z = " +
                            std::to_string(z));
  return ActionMatrix::binary(std::clamp(a.delta / z, 0.0, 1.0),
                              std::clamp(a.gamma / (1.0 - z), 0.0, 1.0));
}

double disturbance_prob(double z, ActionPair a, Bit w) {
  require_feasible(z, a);
  return w == Bit::kZero ? 0.5 * (1.0 + a.delta - a.gamma)
                         : 0.5 * (1.0 - a.delta + a.gamma);
}

double transition_z(double z, ActionPair a, Bit w) {
  const double p = disturbance_prob(z, a, w);
  if (!(p > 0.0))
    throw std::domain_error(std::string("output w = ") + to_char(w) +
                            " has probability zero under this action");
  const double next =
      w == Bit::kZero ? a.delta / p : 1.0 - a.gamma / p;
  return std::clamp(next, 0.0, 1.0);
}

double reward(double z, ActionPair a) {
  require_feasible(z, a);
  return reward_unchecked(a);
}

ValueFunction::ValueFunction(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() < 2)
    throw std::invalid_argument("value grid needs at least 2 points");
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("value function entries must be finite");
}

ValueFunction ValueFunction::zeros(int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument("value grid needs at least 2 points");
  return ValueFunction(std::vector<double>(grid_size, 0.0));
}

PolicyTable::PolicyTable(std::vector<ActionPair> actions)
    : actions_(std::move(actions)) {
  if (actions_.size() < 2)
    throw std::invalid_argument("policy grid needs at least 2 points");
  for (int i = 0; i < grid_size(); ++i)
    if (!is_feasible(z(i), actions_[i], 1e-9))
      throw std::invalid_argument("policy entry " + std::to_string(i) +
                                  " infeasible for its grid point");
}

ActionPair PolicyTable::operator()(double z) const {
  const int last = grid_size() - 1;
  const double zc = std::clamp(z, 0.0, 1.0);
  const double s = zc * last;
  const int i = std::min(static_cast<int>(s), last - 1);
  const double t = s - i;
  const ActionPair& a = actions_[i];
  const ActionPair& b = actions_[i + 1];
  ActionPair out{a.delta + t * (b.delta - a.delta),
                 a.gamma + t * (b.gamma - a.gamma)};
  out.delta = std::clamp(out.delta, 0.0, zc);
  out.gamma = std::clamp(out.gamma, 0.0, 1.0 - zc);
  return out;
}

RectangleMax bellman_apply(const ValueFunction& h, double z, int action_grid) {
  require_belief(z);
  if (action_grid < 2)
    throw std::invalid_argument("action grid needs at least 2 points");
  SearchOptions opt;
  opt.action_grid = action_grid;
  return bellman_apply(h, z, opt);
}

SweepResult bellman_sweep(const ValueFunction& h, const SearchOptions& opt,
                          unsigned threads) {
  if (opt.action_grid < 2)
    throw std::invalid_argument("action grid needs at least 2 points");
  const int n = h.grid_size();
  std::vector<double> values(n);
  std::vector<ActionPair> actions(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const RectangleMax r = bellman_apply(h, h.z(static_cast<int>(i)), opt);
    values[i] = r.value;
    actions[i] = r.best;
  });
  return {ValueFunction(std::move(values)), PolicyTable(std::move(actions))};
}

ValueIterationResult value_iteration(int grid_size, const SearchOptions& opt,
                                     int iterations, unsigned threads) {
  if (iterations < 0)
    throw std::invalid_argument("iteration count must be nonnegative");
  ValueFunction j = ValueFunction::zeros(grid_size);
  for (int k = 0; k < iterations; ++k)
    j = bellman_sweep(j, opt, threads).value;
  PolicyTable greedy = bellman_sweep(j, opt, threads).policy;
  return {std::move(j), std::move(greedy)};
}

ValueIterationResult value_iteration(int grid_size, int action_grid,
                                     int iterations) {
  SearchOptions opt;
  opt.action_grid = action_grid;
  return value_iteration(grid_size, opt, iterations);
}

int histogram_bin(double z, int bins) {
  const double s = std::clamp(z, 0.0, 1.0) * (bins - 1);
  return static_cast<int>(std::lround(s));
}

ChainResult simulate_belief_chain(const Policy& policy, double z0,
                                  std::size_t steps, Rng& rng, int bins) {
  require_belief(z0);
  if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  ChainResult out;
  out.steps = steps;
  out.histogram.assign(bins, 0.0);
  out.final_z = z0;
  if (steps == 0) return out;

  constexpr std::size_t kBatches = 100;
  const std::size_t batch_len = steps / kBatches;
  std::vector<double> batch_sums(kBatches, 0.0);
  std::vector<std::size_t> counts(bins, 0);

  double z = z0;
  double total = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    const ActionPair a = policy(z);
    const double r = reward(z, a);
    total += r;
    if (batch_len > 0 && t / batch_len < kBatches)
      batch_sums[t / batch_len] += r;
    ++counts[histogram_bin(z, bins)];
    const double p0 = 0.5 * (1.0 + a.delta - a.gamma);
    const Bit w = uniform01(rng) < p0 ? Bit::kZero : Bit::kOne;
    z = transition_z(z, a, w);
  }
  out.final_z = z;
  out.avg_reward = total / static_cast<double>(steps);
  for (int b = 0; b < bins; ++b)
    out.histogram[b] =
        static_cast<double>(counts[b]) / static_cast<double>(steps);
  if (batch_len > 0) {
    double mean = 0.0;
    for (double s : batch_sums) mean += s / batch_len;
    mean /= kBatches;
    double var = 0.0;
    for (double s : batch_sums) {
      const double d = s / batch_len - mean;
      var += d * d;
    }
    var /= (kBatches - 1);
    out.std_error = std::sqrt(var / kBatches);
  }
  return out;
}

ChainResult simulate_belief_chain(const PolicyTable& policy, double z0,
                                  std::size_t steps, Rng& rng) {
  return simulate_belief_chain(
      [&policy](double z) { return policy(z); }, z0, steps, rng,
      policy.grid_size());
}

}  // namespace trapdoor::dp
