#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trapdoor/dp.hpp"

namespace trapdoor::sim {

enum class Mode { kDpSim, kCodecRoundtrip, kFlush, kRateTable };

std::string_view mode_name(Mode m);
/// Throws std::invalid_argument for an unknown name.
Mode parse_mode(std::string_view name);

struct ExperimentConfig {
  Mode mode = Mode::kDpSim;
  std::uint64_t seed = 1;
  /// Codec block length; for rate-table the largest N tabulated.
  int block_length = 10;
  /// Codec blocks per message (exhaustive) or in total; flush runs.
  std::uint64_t trials = 1000;
  int grid_size = 2000;
  int action_grid = 4000;
  int iterations = 20;
  /// Belief-chain length for dp-sim.
  std::uint64_t steps = 1000000;
  /// dp-sim: follow the closed-form policy instead of value iteration.
  bool conjectured_policy = false;
  /// dp-sim start belief; defaults to b2 (closed-form policy) or 1/2.
  std::optional<double> z0;
  /// codec-roundtrip: every message x both initial states x `trials` seeds.
  bool exhaustive = false;
  unsigned threads = 0;

  /// Throws std::invalid_argument when a count is out of range.
  void validate() const;
};

/// Named quantity; std::nullopt marks "undefined" (e.g. a zero-step mean).
struct Measurement {
  std::string name;
  std::optional<double> value;
};

/// Passes iff lower <= measured <= upper.
struct ReportCheck {
  std::string name;
  double measured = 0.0;
  double reference = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = false;
};

struct RateRow {
  int block_length = 0;
  std::uint64_t codebook_size = 0;
  double rate = 0.0;
  double gap = 0.0;  // log2(phi) - rate
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Measurement> measurements;
  std::vector<ReportCheck> checks;
  std::vector<RateRow> rate_table;
  /// Flush length distribution: uses -> count, index = uses.
  std::vector<std::uint64_t> flush_histogram;
  /// Dp-sim belief histogram over the value grid.
  std::vector<double> belief_histogram;
  /// Human-readable description of failed codec trials (first few).
  std::vector<std::string> failures;
  /// Not part of the deterministic output unless requested.
  double wall_clock_seconds = 0.0;

  bool passed() const;
  std::optional<double> measurement(std::string_view name) const;
};

/// Fraction of histogram mass within one bin of the nearest of b1..b4.
double concentration_near_recurrent_beliefs(const std::vector<double>& hist);

ExperimentReport run_dp_simulation(const ExperimentConfig& cfg);
/// Dp-sim for a learned policy already computed on cfg.grid_size points.
ExperimentReport run_dp_simulation(const ExperimentConfig& cfg,
                                   const dp::PolicyTable& policy);
ExperimentReport run_codec_roundtrip(const ExperimentConfig& cfg);
ExperimentReport run_flush(const ExperimentConfig& cfg);
ExperimentReport run_rate_table(const ExperimentConfig& cfg);

/// Dispatches on cfg.mode.
ExperimentReport run(const ExperimentConfig& cfg);

}  // namespace trapdoor::sim
