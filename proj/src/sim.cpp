#include "trapdoor/sim.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "trapdoor/codec.hpp"
#include "trapdoor/dp.hpp"
#include "trapdoor/golden.hpp"
#include "trapdoor/numeric.hpp"
#include "trapdoor/parallel.hpp"

namespace trapdoor::sim {

namespace {

ReportCheck range_check(std::string name, double measured, double reference,
                        double lower, double upper) {
  return ReportCheck{std::move(name), measured, reference, lower, upper,
                     measured >= lower && measured <= upper};
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Chi-square goodness of fit of flush lengths against the geometric law
// P(k-th attempt succeeds) = 2^-k, attempts being every other channel use.
double geometric_fit_p_value(const std::vector<std::uint64_t>& attempts) {
  const double n = static_cast<double>(attempts.size());
  if (n < 10) return std::numeric_limits<double>::quiet_NaN();
  // Last bin is the tail k >= kmax; choose kmax so every expected count >= 5.
  int kmax = 1;
  while (n * std::ldexp(1.0, -(kmax + 1)) >= 5.0) ++kmax;
  if (kmax < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> observed(kmax + 1, 0.0);
  for (std::uint64_t a : attempts)
    observed[std::min<std::uint64_t>(a, kmax)] += 1.0;
  double stat = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double p = k < kmax ? std::ldexp(1.0, -k) : std::ldexp(1.0, -(kmax - 1));
    const double e = n * p;
    stat += (observed[k] - e) * (observed[k] - e) / e;
  }
  boost::math::chi_squared dist(kmax - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kDpSim: return "dp-sim";
    case Mode::kCodecRoundtrip: return "codec-roundtrip";
    case Mode::kFlush: return "flush";
    case Mode::kRateTable: return "rate-table";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kDpSim, Mode::kCodecRoundtrip, Mode::kFlush,
                 Mode::kRateTable})
    if (mode_name(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (grid_size < 2) throw std::invalid_argument("grid size must be >= 2");
  if (action_grid < 2) throw std::invalid_argument("action grid must be >= 2");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (block_length < 1 || block_length > codec::kMaxBlockLength)
    throw std::invalid_argument("block length must be in [1, " +
                                std::to_string(codec::kMaxBlockLength) + "]");
  if (z0 && !(*z0 >= 0.0 && *z0 <= 1.0))
    throw std::invalid_argument("z0 must lie in [0,1]");
}

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ReportCheck& c) { return c.passed; });
}

std::optional<double> ExperimentReport::measurement(std::string_view name) const {
  for (const auto& m : measurements)
    if (m.name == name) return m.value;
  return std::nullopt;
}

double concentration_near_recurrent_beliefs(const std::vector<double>& hist) {
  const int bins = static_cast<int>(hist.size());
  std::vector<int> centers;
  for (double b : golden::constants().recurrent_beliefs())
    centers.push_back(dp::histogram_bin(b, bins));
  double mass = 0.0;
  for (int i = 0; i < bins; ++i) {
    const bool near = std::any_of(centers.begin(), centers.end(),
                                  [i](int c) { return std::abs(i - c) <= 1; });
    if (near) mass += hist[i];
  }
  return mass;
}

namespace {

ExperimentReport simulate_policy(const ExperimentConfig& cfg,
                                 const dp::Policy& policy, double z0) {
  const Stopwatch clock;
  const auto& k = golden::constants();
  ExperimentReport rep;
  rep.config = cfg;

  Rng rng(derive_seed(cfg.seed, 0));
  const dp::ChainResult chain =
      dp::simulate_belief_chain(policy, z0, cfg.steps, rng, cfg.grid_size);
  rep.belief_histogram = chain.histogram;

  const bool defined = chain.steps > 0;
  rep.measurements.push_back({"steps", static_cast<double>(chain.steps)});
  rep.measurements.push_back({"reward_defined", defined ? 1.0 : 0.0});
  rep.measurements.push_back(
      {"avg_reward", defined ? std::optional<double>(chain.avg_reward)
                             : std::nullopt});
  rep.measurements.push_back(
      {"std_error", std::isnan(chain.std_error)
                        ? std::nullopt
                        : std::optional<double>(chain.std_error)});
  rep.measurements.push_back({"log2_phi", k.rho});
  if (!defined) {
    rep.wall_clock_seconds = clock.seconds();
    return rep;
  }
  const double conc = concentration_near_recurrent_beliefs(chain.histogram);
  rep.measurements.push_back({"concentration", conc});

  if (cfg.conjectured_policy) {
    rep.checks.push_back(range_check("avg_reward_vs_log2_phi", chain.avg_reward,
                                     k.rho, k.rho - 0.002, k.rho + 0.002));
  } else {
    rep.checks.push_back(range_check("avg_reward_window", chain.avg_reward,
                                     0.694, 0.692, 0.696));
  }
  if (!std::isnan(chain.std_error)) {
    rep.checks.push_back(range_check(
        "avg_reward_not_above_optimum", chain.avg_reward, k.rho,
        -std::numeric_limits<double>::infinity(),
        k.rho + 3.0 * chain.std_error));
  }
  rep.checks.push_back(range_check("concentration_near_b1_b4", conc, 1.0,
                                   0.999, 1.0 + 1e-9));
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

}  // namespace

ExperimentReport run_dp_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.conjectured_policy)
    return simulate_policy(cfg, golden::conjectured_policy,
                           cfg.z0.value_or(golden::constants().b2));
  const Stopwatch clock;
  dp::SearchOptions opt;
  opt.action_grid = cfg.action_grid;
  const dp::PolicyTable table =
      dp::value_iteration(cfg.grid_size, opt, cfg.iterations, cfg.threads)
          .policy;
  ExperimentReport rep = run_dp_simulation(cfg, table);
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_dp_simulation(const ExperimentConfig& cfg,
                                   const dp::PolicyTable& table) {
  cfg.validate();
  if (table.grid_size() != cfg.grid_size)
    throw std::invalid_argument("policy grid does not match grid_size");
  return simulate_policy(
      cfg, [&table](double z) { return table(z); }, cfg.z0.value_or(0.5));
}

ExperimentReport run_codec_roundtrip(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch clock;
  ExperimentReport rep;
  rep.config = cfg;
  const int n = cfg.block_length;
  const std::uint64_t size = codec::codebook_size(n);
  const std::uint64_t total =
      cfg.exhaustive ? size * 2 * cfg.trials : cfg.trials;

  // Trial i owns stream i; exhaustive runs enumerate (message, s0, seed).
  auto draw = [&](std::size_t i, Rng& rng) {
    if (cfg.exhaustive)
      return std::pair<std::uint64_t, ChannelState>{
          i / (2 * cfg.trials),
          ((i / cfg.trials) % 2) ? Bit::kOne : Bit::kZero};
    const std::uint64_t index = uniform_below(rng, size);
    return std::pair<std::uint64_t, ChannelState>{index, fair_bit(rng)};
  };

  std::vector<std::uint8_t> ok(total, 0);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, i));
    const auto [index, s0] = draw(i, rng);
    const codec::ActionSequence word = codec::unrank({index, n});
    const codec::TransmissionRecord tx = codec::transmit(word, s0, rng);
    const codec::Message back = codec::rank(codec::decode_block(tx.outputs));
    ok[i] = back.index == index ? 1 : 0;
  });

  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]) continue;
    ++errors;
    if (rep.failures.size() < 10) {
      // Replay the trial to build its trace.
      Rng rng(derive_seed(cfg.seed, i));
      const auto [index, s0] = draw(i, rng);
      const auto word = codec::unrank({index, n});
      const auto tx = codec::transmit(word, s0, rng);
      const auto decoded = codec::decode_block(tx.outputs);
      std::ostringstream os;
      os << "trial " << i << ": message " << index << " s0 " << to_char(s0)
         << " codeword " << word.str() << " y " << codec::format_word(tx.outputs)
         << " decoded " << decoded.str();
      rep.failures.push_back(os.str());
    }
  }

  const double rate = std::log2(static_cast<double>(size)) / n;
  const double rho = golden::constants().rho;
  rep.measurements.push_back({"block_length", static_cast<double>(n)});
  rep.measurements.push_back({"codebook_size", static_cast<double>(size)});
  rep.measurements.push_back({"blocks", static_cast<double>(total)});
  rep.measurements.push_back({"errors", static_cast<double>(errors)});
  rep.measurements.push_back({"rate", rate});
  rep.checks.push_back(range_check("decoding_errors", static_cast<double>(errors),
                                   0.0, 0.0, 0.0));
  if (n >= 64)
    rep.checks.push_back(
        range_check("rate_near_log2_phi", rate, rho, rho - 0.02, rho + 0.02));
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_flush(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch clock;
  ExperimentReport rep;
  rep.config = cfg;

  std::vector<codec::FlushResult> results(cfg.trials);
  std::vector<ChannelState> initial(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, i));
    initial[i] = fair_bit(rng);
    results[i] = codec::flush(rng, initial[i]);
  });

  std::uint64_t capped = 0, wrong_state = 0, sum = 0, done = 0;
  std::vector<std::uint64_t> attempts0, attempts1;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.succeeded) {
      ++capped;
      continue;
    }
    ++done;
    sum += r.uses;
    if (r.learned_state != r.true_state) ++wrong_state;
    if (rep.flush_histogram.size() <= static_cast<std::size_t>(r.uses))
      rep.flush_histogram.resize(r.uses + 1, 0);
    ++rep.flush_histogram[r.uses];
    // From s0 = 0 the successes can only happen on even uses (2k); from
    // s0 = 1 only on odd uses (2k - 1).
    if (initial[i] == Bit::kZero)
      attempts0.push_back(static_cast<std::uint64_t>(r.uses) / 2);
    else
      attempts1.push_back((static_cast<std::uint64_t>(r.uses) + 1) / 2);
  }
  const double mean = done ? static_cast<double>(sum) / done
                           : std::numeric_limits<double>::quiet_NaN();
  const double p0 = geometric_fit_p_value(attempts0);
  const double p1 = geometric_fit_p_value(attempts1);

  rep.measurements.push_back({"trials", static_cast<double>(cfg.trials)});
  rep.measurements.push_back(
      {"mean_uses", done ? std::optional<double>(mean) : std::nullopt});
  rep.measurements.push_back({"cap_exceeded", static_cast<double>(capped)});
  rep.measurements.push_back({"wrong_state", static_cast<double>(wrong_state)});
  rep.measurements.push_back(
      {"geometric_p_value_s0_0",
       std::isnan(p0) ? std::nullopt : std::optional<double>(p0)});
  rep.measurements.push_back(
      {"geometric_p_value_s0_1",
       std::isnan(p1) ? std::nullopt : std::optional<double>(p1)});

  if (done) rep.checks.push_back(range_check("mean_uses", mean, 3.5, 3.4, 3.6));
  rep.checks.push_back(range_check("learned_state_correct",
                                   static_cast<double>(wrong_state), 0.0, 0.0, 0.0));
  if (!std::isnan(p0))
    rep.checks.push_back(
        range_check("geometric_fit_s0_0", p0, 1.0, 0.01, 1.0));
  if (!std::isnan(p1))
    rep.checks.push_back(
        range_check("geometric_fit_s0_1", p1, 1.0, 0.01, 1.0));
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_rate_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch clock;
  ExperimentReport rep;
  rep.config = cfg;
  const double rho = golden::constants().rho;
  int decreases = 0;
  for (int n = 1; n <= cfg.block_length; ++n) {
    const std::uint64_t size = codec::codebook_size(n);
    const double rate = std::log2(static_cast<double>(size)) / n;
    if (!rep.rate_table.empty() && rate <= rep.rate_table.back().rate)
      ++decreases;
    rep.rate_table.push_back({n, size, rate, rho - rate});
  }
  rep.measurements.push_back({"max_block_length",
                              static_cast<double>(cfg.block_length)});
  rep.measurements.push_back({"final_rate", rep.rate_table.back().rate});
  rep.checks.push_back(range_check("rate_strictly_increasing",
                                   static_cast<double>(decreases), 0.0, 0.0, 0.0));
  if (cfg.block_length >= 64) {
    const double r64 = rep.rate_table[63].rate;
    rep.checks.push_back(
        range_check("rate_at_64_near_log2_phi", r64, rho, rho - 0.02, rho + 0.02));
  }
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

ExperimentReport run(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case Mode::kDpSim: return run_dp_simulation(cfg);
    case Mode::kCodecRoundtrip: return run_codec_roundtrip(cfg);
    case Mode::kFlush: return run_flush(cfg);
    case Mode::kRateTable: return run_rate_table(cfg);
  }
  throw std::invalid_argument("unknown mode");
}

}  // namespace trapdoor::sim
