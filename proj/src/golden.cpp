#include "trapdoor/golden.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trapdoor/numeric.hpp"
#include "trapdoor/parallel.hpp"

namespace trapdoor::golden {

namespace {

constexpr double kDomainSlack = 1e-12;

GoldenConstants make_constants() {
  const double s5 = std::sqrt(5.0);
  GoldenConstants c{};
  c.phi = (1.0 + s5) / 2.0;
  c.rho = std::log2(c.phi);
  c.b1 = s5 - 2.0;
  c.b2 = (3.0 - s5) / 2.0;
  c.b3 = (s5 - 1.0) / 2.0;
  c.b4 = 3.0 - s5;
  c.c1 = std::log2(3.0 - s5);
  c.c2 = std::log2(s5 - 1.0);
  return c;
}

void require_core(double z, const char* what) {
  const auto& k = constants();
  if (!(z >= k.b1 - kDomainSlack && z <= k.b4 + kDomainSlack))
    throw std::domain_error(std::string(what) +
                            " defined on [b1,b4] only, got z = " +
                            std::to_string(z));
}

bool in_core(double z) {
  const auto& k = constants();
  return z >= k.b1 && z <= k.b4;
}

Check make_check(std::string name, double measured, double tolerance) {
  return Check{std::move(name), measured, tolerance, measured <= tolerance};
}

}  // namespace

const GoldenConstants& constants() {
  static const GoldenConstants c = make_constants();
  return c;
}

dp::ActionPair conjectured_policy(double z) {
  require_core(z, "policy");
  const auto& k = constants();
  if (z <= k.b2) return {z, k.b3 * (1.0 - z)};
  if (z <= k.b3) return {k.b2, k.b2};
  return {k.b3 * z, 1.0 - z};
}

double h_tilde(double z) {
  require_core(z, "h_tilde");
  const auto& k = constants();
  if (z <= k.b2) return binary_entropy(z) - k.rho * z + k.c2;
  if (z <= k.b3) return 1.0;
  return binary_entropy(z) + k.rho * z + k.c1;
}

double extension_slope_right() {
  const auto& k = constants();
  return std::log2((1.0 - k.b4) / k.b4) + k.rho;
}

double h_extended(double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("h_extended takes z in [0,1], got " +
                                std::to_string(z));
  const auto& k = constants();
  const double slope = extension_slope_right();
  if (z > k.b4) return h_tilde(k.b4) + slope * (z - k.b4);
  // Mirror image of the right branch.
  if (z < k.b1) return h_tilde(k.b1) - slope * (z - k.b1);
  return h_tilde(z);
}

double markov_entropy_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("probability must lie in [0,1]");
  return binary_entropy(p) / (1.0 + p);
}

double residual_tolerance(int grid_size) {
  const double ref = 1.0 / 4000.0;
  const double h = 1.0 / (grid_size - 1);
  return 1e-4 * std::max(1.0, (h / ref) * (h / ref));
}

bool FixedPointReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

bool StationaryReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

FixedPointReport verify_fixed_point(const FixedPointOptions& opt) {
  if (opt.grid_size < 2 || opt.action_grid < 2 || opt.iterations < 1)
    throw std::invalid_argument(
        "verify needs grid >= 2, action grid >= 2 and iterations >= 1");
  const auto& k = constants();
  const double rho = opt.override_rho ? opt.rho : k.rho;

  dp::SearchOptions search;
  search.action_grid = opt.action_grid;

  FixedPointReport rep;
  rep.grid_size = opt.grid_size;
  rep.action_grid = opt.action_grid;
  rep.iterations = opt.iterations;
  rep.grid_spacing = 1.0 / (opt.grid_size - 1);
  rep.rho_used = rho;
  rep.rho_error = std::abs(rho - std::log2((1.0 + std::sqrt(5.0)) / 2.0));

  auto deviation = [&](const dp::ValueFunction& h) {
    double worst = 0.0;
    for (int i = 0; i < h.grid_size(); ++i)
      if (in_core(h.z(i)))
        worst = std::max(worst, std::abs(h[i] - h_tilde(h.z(i))));
    for (double b : k.recurrent_beliefs())
      worst = std::max(worst, std::abs(h(b) - h_tilde(b)));
    return worst;
  };

  dp::ValueFunction h = dp::ValueFunction::sample(opt.grid_size, h_extended);
  if (opt.keep_iterates) rep.iterates.push_back(h);
  rep.records.push_back({0, deviation(h), 0.0, 0.0});

  for (int it = 1; it <= opt.iterations; ++it) {
    std::vector<double> next =
        dp::bellman_sweep(h, search, opt.threads).value.values();
    double max_inc = -std::numeric_limits<double>::infinity();
    double sup = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] -= rho;
      const double d = next[i] - h[static_cast<int>(i)];
      max_inc = std::max(max_inc, d);
      sup = std::max(sup, std::abs(d));
    }
    h = dp::ValueFunction(std::move(next));
    if (opt.keep_iterates) rep.iterates.push_back(h);
    rep.records.push_back({it, deviation(h), max_inc, sup});
  }

  // Bellman residual of the final iterate on [b1,b4], at grid points inside
  // the interval and at the four constants themselves.
  std::vector<double> zs;
  for (int i = 0; i < h.grid_size(); ++i)
    if (in_core(h.z(i))) zs.push_back(h.z(i));
  for (double b : k.recurrent_beliefs()) zs.push_back(b);
  std::vector<double> res_tilde(zs.size()), res_self(zs.size());
  parallel_for(zs.size(), opt.threads, [&](std::size_t i) {
    const double th = dp::bellman_apply(h, zs[i], search).value;
    res_tilde[i] = std::abs(th - rho - h_tilde(zs[i]));
    res_self[i] = std::abs(th - rho - h(zs[i]));
  });
  rep.bellman_residual = *std::max_element(res_tilde.begin(), res_tilde.end());
  rep.self_residual = *std::max_element(res_self.begin(), res_self.end());

  rep.argmax_at_b2 = dp::bellman_apply(h, k.b2, search).best;
  rep.argmax_at_b2_error = std::max(std::abs(rep.argmax_at_b2.delta - k.b2),
                                    std::abs(rep.argmax_at_b2.gamma - k.b2));

  const double tol = residual_tolerance(opt.grid_size);
  double worst_dev = 0.0, worst_inc = 0.0, worst_growth = 0.0;
  for (const auto& r : rep.records) {
    worst_dev = std::max(worst_dev, r.fixed_point_deviation);
    if (r.iteration >= 1) worst_inc = std::max(worst_inc, r.max_increase);
    if (r.iteration >= 2)
      worst_growth = std::max(
          worst_growth,
          r.sup_difference - rep.records[r.iteration - 1].sup_difference);
  }
  rep.checks.push_back(make_check("rho_equals_log2_phi", rep.rho_error, 1e-10));
  rep.checks.push_back(make_check("fixed_point_deviation", worst_dev, tol));
  rep.checks.push_back(make_check("bellman_residual", rep.bellman_residual, tol));
  rep.checks.push_back(make_check("monotone_nonincreasing", worst_inc, 1e-9));
  rep.checks.push_back(
      make_check("sup_differences_nonincreasing", worst_growth, 1e-12));
  rep.checks.push_back(make_check("argmax_at_b2", rep.argmax_at_b2_error,
                                  1.0 / (opt.action_grid - 1)));
  return rep;
}

StationaryReport stationary_check() {
  const auto& k = constants();
  const auto bs = k.recurrent_beliefs();
  StationaryReport rep;
  rep.closed = true;

  for (int i = 0; i < 4; ++i) {
    const dp::ActionPair a = conjectured_policy(bs[i]);
    rep.rewards[i] = dp::reward(bs[i], a);
    for (Bit w : {Bit::kZero, Bit::kOne}) {
      ChainTransition t;
      t.from = i;
      t.output = w;
      t.probability = dp::disturbance_prob(bs[i], a, w);
      if (t.probability <= 0.0) continue;
      t.successor = dp::transition_z(bs[i], a, w);
      for (int j = 0; j < 4; ++j)
        if (std::abs(t.successor - bs[j]) <= 1e-12) t.to = j;
      if (t.to < 0)
        rep.closed = false;
      else
        rep.matrix[i][t.to] += t.probability;
      rep.transitions.push_back(t);
    }
  }

  Eigen::Matrix4d p;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) p(i, j) = rep.matrix[i][j];

  // Primitive (irreducible and aperiodic) iff some power is strictly
  // positive; for 4 states the power (4-1)^2 + 1 = 10 suffices.
  Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
  for (int n = 0; n < 10; ++n) power = power * p;
  rep.irreducible_aperiodic = rep.closed && (power.array() > 0.0).all();

  // pi (P - I) = 0 with the normalization replacing one equation.
  Eigen::Matrix4d a = p.transpose() - Eigen::Matrix4d::Identity();
  a.row(3).setOnes();
  Eigen::Vector4d rhs(0.0, 0.0, 0.0, 1.0);
  const Eigen::Vector4d pi = a.fullPivLu().solve(rhs);
  for (int i = 0; i < 4; ++i) rep.stationary[i] = pi(i);
  rep.expected_reward = 0.0;
  for (int i = 0; i < 4; ++i) rep.expected_reward += pi(i) * rep.rewards[i];
  rep.reward_error = std::abs(rep.expected_reward - k.rho);

  rep.checks.push_back(make_check("closure", rep.closed ? 0.0 : 1.0, 0.0));
  rep.checks.push_back(make_check(
      "irreducible_aperiodic", rep.irreducible_aperiodic ? 0.0 : 1.0, 0.0));
  rep.checks.push_back(
      make_check("stationary_reward", rep.reward_error, 1e-10));
  return rep;
}

}  // namespace trapdoor::golden
