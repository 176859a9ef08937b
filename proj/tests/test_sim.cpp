#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "trapdoor/golden.hpp"
#include "trapdoor/io.hpp"
#include "trapdoor/sim.hpp"

using namespace trapdoor;
using namespace trapdoor::sim;

namespace {
const auto& K = golden::constants();

ExperimentConfig config(Mode m) {
  ExperimentConfig c;
  c.mode = m;
  return c;
}

bool check_passed(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.passed;
  FAIL("missing check " << name);
  return false;
}
}  // namespace

TEST_CASE("mode names") {
  for (Mode m : {Mode::kDpSim, Mode::kCodecRoundtrip, Mode::kFlush, Mode::kRateTable})
    CHECK(parse_mode(mode_name(m)) == m);
  CHECK(mode_name(Mode::kDpSim) == "dp-sim");
  CHECK_THROWS_AS(parse_mode("bogus"), std::invalid_argument);
}

TEST_CASE("configuration validation") {
  auto c = config(Mode::kFlush);
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config(Mode::kDpSim);
  c.grid_size = 1;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = config(Mode::kCodecRoundtrip);
  c.block_length = 93;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = config(Mode::kDpSim);
  c.z0 = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("recurrent-belief concentration") {
  std::vector<double> h(2000, 0.0);
  for (double b : K.recurrent_beliefs()) h[dp::histogram_bin(b, 2000)] += 0.25;
  CHECK(concentration_near_recurrent_beliefs(h) == doctest::Approx(1.0));
  std::vector<double> mid(2000, 0.0);
  mid[1000] = 1.0;
  CHECK(concentration_near_recurrent_beliefs(mid) == 0.0);
  std::vector<double> off(2000, 0.0);
  off[dp::histogram_bin(K.b2, 2000) + 1] = 0.5;
  off[dp::histogram_bin(K.b2, 2000) + 2] = 0.5;
  CHECK(concentration_near_recurrent_beliefs(off) == doctest::Approx(0.5));
}

TEST_CASE("dp simulation with the conjectured policy") {
  auto c = config(Mode::kDpSim);
  c.conjectured_policy = true;
  c.steps = 200000;
  const auto r = run(c);
  CHECK(r.passed());
  CHECK(std::abs(*r.measurement("avg_reward") - K.rho) <= 0.002);
  CHECK(*r.measurement("concentration") >= 0.999);
}

TEST_CASE("zero-step dp simulation reports an undefined reward") {
  auto c = config(Mode::kDpSim);
  c.conjectured_policy = true;
  c.steps = 0;
  const auto r = run(c);
  CHECK_FALSE(r.measurement("avg_reward").has_value());
  CHECK(*r.measurement("reward_defined") == 0.0);
  for (double h : r.belief_histogram) CHECK(h == 0.0);
  const auto j = io::to_json(r);
  CHECK(j["measurements"]["avg_reward"].is_null());
}

TEST_CASE("dp simulation with a learned policy on a coarse grid") {
  auto c = config(Mode::kDpSim);
  c.grid_size = 201;
  c.action_grid = 401;
  c.iterations = 20;
  c.steps = 100000;
  const auto r = run(c);
  CHECK(check_passed(r, "avg_reward_not_above_optimum"));
  CHECK(*r.measurement("avg_reward") > 0.68);
}

TEST_CASE("codec round trip") {
  SUBCASE("every message at N = 10") {
    auto c = config(Mode::kCodecRoundtrip);
    c.exhaustive = true;
    c.trials = 100;
    const auto r = run(c);
    CHECK(r.passed());
    CHECK(*r.measurement("errors") == 0.0);
    CHECK(*r.measurement("blocks") == 89.0 * 2 * 100);
    CHECK(*r.measurement("rate") == doctest::Approx(std::log2(89.0) / 10));
  }
  SUBCASE("N = 64 rate") {
    auto c = config(Mode::kCodecRoundtrip);
    c.block_length = 64;
    c.trials = 2000;
    const auto r = run(c);
    CHECK(r.passed());
    CHECK(std::abs(*r.measurement("rate") - K.rho) <= 0.02);
  }
  SUBCASE("N = 1 carries no information") {
    auto c = config(Mode::kCodecRoundtrip);
    c.block_length = 1;
    const auto r = run(c);
    CHECK(r.passed());
    CHECK(*r.measurement("rate") == 0.0);
    CHECK(*r.measurement("errors") == 0.0);
  }
}

TEST_CASE("flush experiment") {
  auto c = config(Mode::kFlush);
  c.trials = 100000;
  const auto r = run(c);
  CHECK(r.passed());
  const double mean = *r.measurement("mean_uses");
  CHECK(mean >= 3.4);
  CHECK(mean <= 3.6);
  CHECK(*r.measurement("cap_exceeded") == 0.0);
  CHECK(check_passed(r, "geometric_fit_s0_0"));
  CHECK(check_passed(r, "geometric_fit_s0_1"));
  for (int k = 1; k <= 6; ++k) CHECK(r.flush_histogram.at(k) > 0);
  CHECK(r.flush_histogram.at(0) == 0);
}

TEST_CASE("rate table") {
  auto c = config(Mode::kRateTable);
  c.block_length = 64;
  const auto r = run(c);
  CHECK(r.passed());
  REQUIRE(r.rate_table.size() == 64);
  for (std::size_t i = 1; i < r.rate_table.size(); ++i)
    CHECK(r.rate_table[i].rate > r.rate_table[i - 1].rate);
  CHECK(r.rate_table[63].rate ==
        doctest::Approx(std::log2(static_cast<double>(r.rate_table[63].codebook_size)) / 64));
  CHECK(std::abs(r.rate_table[63].rate - K.rho) <= 0.02);
}

TEST_CASE("reports are byte-identical for the same configuration") {
  for (Mode m : {Mode::kFlush, Mode::kCodecRoundtrip}) {
    auto c = config(m);
    c.trials = 5000;
    c.seed = 99;
    c.threads = 1;
    const auto a = io::to_json(run(c)).dump();
    c.threads = 3;
    const auto b = io::to_json(run(c)).dump();
    CHECK(a == b);
    c.seed = 100;
    CHECK(io::to_json(run(c)).dump() != a);
  }
  auto d = config(Mode::kDpSim);
  d.grid_size = 101;
  d.action_grid = 201;
  d.iterations = 5;
  d.steps = 10000;
  CHECK(io::to_json(run(d)).dump() == io::to_json(run(d)).dump());
}
