// trapdoor: solve, verify, codec, simulate and constants front end.
//
// Exit codes: 0 all checks passed, 1 a check failed or a file could not be
// written, 2 usage error. Output files are written only under --out, or
// under $TRAPDOOR_OUT_DIR when --out is not given.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "trapdoor/codec.hpp"
#include "trapdoor/dp.hpp"
#include "trapdoor/golden.hpp"
#include "trapdoor/io.hpp"
#include "trapdoor/numeric.hpp"
#include "trapdoor/sim.hpp"

namespace fs = std::filesystem;
using namespace trapdoor;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr const char* kOutDirEnv = "TRAPDOOR_OUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<fs::path> output_dir(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv(kOutDirEnv); env && *env)
    return fs::path(env);
  return std::nullopt;
}

void write_file(const fs::path& dir, const std::string& name,
                const std::function<void(std::ostream&)>& body) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  body(os);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  int grid = 2000;
  int actions = 4000;
  int iters = 20;
  std::uint64_t steps = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  bool json = false;
};

int cmd_solve(const SolveArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  dp::SearchOptions opt;
  opt.action_grid = a.actions;
  const auto vi = dp::value_iteration(a.grid, opt, a.iters, a.threads);

  sim::ExperimentConfig cfg;
  cfg.mode = sim::Mode::kDpSim;
  cfg.seed = a.seed;
  cfg.grid_size = a.grid;
  cfg.action_grid = a.actions;
  cfg.iterations = a.iters;
  cfg.steps = a.steps;
  cfg.threads = a.threads;
  sim::ExperimentReport rep = sim::run_dp_simulation(cfg, vi.policy);
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (auto dir = output_dir(a.out)) {
    const dp::ValueFunction& j = vi.value;
    std::vector<double> diff(j.values());
    for (double& v : diff) v -= j[0];
    write_file(*dir, "value.csv",
               [&](std::ostream& os) { io::write_value_csv(os, j); });
    write_file(*dir, "differential.csv", [&](std::ostream& os) {
      io::write_value_csv(os, dp::ValueFunction(diff), "differential");
    });
    write_file(*dir, "policy.csv", [&](std::ostream& os) {
      io::write_policy_csv(os, j, vi.policy);
    });
    write_file(*dir, "histogram.csv", [&](std::ostream& os) {
      io::write_histogram_csv(os, rep.belief_histogram);
    });
    write_file(*dir, "solve.json", [&](std::ostream& os) {
      os << io::to_json(rep).dump(2) << '\n';
    });
  }
  if (a.json)
    std::cout << io::to_json(rep).dump(2) << '\n';
  else
    io::print_report(std::cout, rep);
  return rep.passed() ? kExitPass : kExitFail;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  int grid = 4001;
  int actions = 8001;
  int iters = 30;
  std::optional<double> rho;
  unsigned threads = 0;
  std::string out;
  bool json = false;
};

int cmd_verify(const VerifyArgs& a) {
  golden::FixedPointOptions opt;
  opt.grid_size = a.grid;
  opt.action_grid = a.actions;
  opt.iterations = a.iters;
  opt.threads = a.threads;
  if (a.rho) {
    opt.rho = *a.rho;
    opt.override_rho = true;
  }
  const auto dir = output_dir(a.out);
  opt.keep_iterates = dir.has_value();
  const auto fp = golden::verify_fixed_point(opt);
  const auto st = golden::stationary_check();

  io::Json j;
  j["schema"] = "trapdoor.verify_run/1";
  j["fixed_point"] = io::to_json(fp);
  j["stationary"] = io::to_json(st);
  j["passed"] = fp.passed() && st.passed();
  if (dir) {
    write_file(*dir, "verify.json",
               [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    write_file(*dir, "iterates.csv", [&](std::ostream& os) {
      io::write_iterates_csv(os, fp.iterates);
    });
  }
  if (a.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    io::print_report(std::cout, fp);
    io::print_report(std::cout, st);
    std::cout << (fp.passed() && st.passed() ? "PASS" : "FAIL") << '\n';
  }
  return fp.passed() && st.passed() ? kExitPass : kExitFail;
}

// ---- codec ---------------------------------------------------------------

struct CodecArgs {
  std::optional<std::uint64_t> message;
  int n = 10;
  std::uint64_t seed = 1;
  int state = 0;
  bool trace = false;
  std::string replay;
  bool json = false;
};

void print_trace(std::ostream& os, const codec::BitWord& y,
                 const codec::DecodeTrace& t) {
  const std::size_t n = y.size();
  const int w = static_cast<int>(std::max<std::size_t>(n, 5));
  auto row = [&](const std::string& var, const std::string& val,
                 std::string_view reason) {
    os << std::left << std::setw(10) << var << std::right << std::setw(w)
       << val << "  " << reason << '\n';
  };
  row("variable", "value", "reason");
  row("y", codec::format_word(y), "channel output");
  row("~y", codec::DifferentialOutput(y).str(), "differential output");
  const std::string full = t.actions.str();
  bool first = true;
  for (const auto& s : t.steps) {
    row(first ? "~x" : "", full.substr(s.position - 1),
        codec::case_label(s.reason));
    first = false;
  }
}

io::Json trace_json(const codec::BitWord& y, const codec::DecodeTrace& t) {
  io::Json steps = io::Json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"k", s.position},
                     {"bit", to_int(s.decided)},
                     {"reason", std::string(codec::case_label(s.reason))}});
  return {{"y", codec::format_word(y)},
          {"y_diff", codec::DifferentialOutput(y).str()},
          {"steps", steps},
          {"decoded", t.actions.str()}};
}

int cmd_codec(const CodecArgs& a) {
  if (!a.replay.empty()) {
    codec::BitWord y;
    try {
      y = codec::parse_word(a.replay);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (y.empty()) throw UsageError("--replay-output must not be empty");
    const auto t = codec::decode_block_traced(y);
    const auto m = codec::rank(t.actions);
    bool ok = true;
    if (a.message && *a.message != m.index) ok = false;
    if (a.json) {
      io::Json j = trace_json(y, t);
      j["decoded_message"] = m.index;
      if (a.message) j["expected_message"] = *a.message;
      j["passed"] = ok;
      std::cout << j.dump(2) << '\n';
    } else {
      print_trace(std::cout, y, t);
      std::cout << "decoded message " << m.index << '\n';
    }
    return ok ? kExitPass : kExitFail;
  }

  if (!a.message) throw UsageError("--message is required without --replay-output");
  if (a.n < 1 || a.n > codec::kMaxBlockLength)
    throw UsageError("--N must be in [1, " +
                     std::to_string(codec::kMaxBlockLength) + "]");
  const std::uint64_t size = codec::codebook_size(a.n);
  if (*a.message >= size)
    throw UsageError("message " + std::to_string(*a.message) +
                     " out of range: N=" + std::to_string(a.n) + " has " +
                     std::to_string(size) + " messages");

  const auto c = codec::unrank({*a.message, a.n});
  Rng rng(derive_seed(a.seed, 0));
  const auto tx = codec::transmit(c, bit_from_int(a.state), rng);
  const auto t = codec::decode_block_traced(tx.outputs);
  const auto decoded = codec::rank(t.actions).index;
  const bool ok = decoded == *a.message;

  if (a.json) {
    io::Json j = {{"message", *a.message},
                  {"N", a.n},
                  {"seed", a.seed},
                  {"initial_state", a.state},
                  {"codeword", c.str()},
                  {"inputs", codec::format_word(tx.inputs)}};
    if (a.trace) j["trace"] = trace_json(tx.outputs, t);
    j["outputs"] = codec::format_word(tx.outputs);
    j["decoded_message"] = decoded;
    j["passed"] = ok;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "message  " << *a.message << " of " << size << '\n'
              << "codeword " << c.str() << '\n'
              << "inputs   " << codec::format_word(tx.inputs) << '\n'
              << "outputs  " << codec::format_word(tx.outputs) << '\n';
    if (a.trace) print_trace(std::cout, tx.outputs, t);
    std::cout << "decoded  " << decoded << (ok ? "  ok" : "  MISMATCH")
              << '\n';
  }
  return ok ? kExitPass : kExitFail;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string mode;
  sim::ExperimentConfig cfg;
  std::optional<double> z0;
  std::string out;
  bool json = false;
  bool timing = false;
};

int cmd_simulate(SimulateArgs a) {
  try {
    a.cfg.mode = sim::parse_mode(a.mode);
    a.cfg.z0 = a.z0;
    a.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rep = sim::run(a.cfg);
  const io::Json j = io::to_json(rep, a.timing);
  if (auto dir = output_dir(a.out)) {
    write_file(*dir, "report.json",
               [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    if (!rep.belief_histogram.empty())
      write_file(*dir, "histogram.csv", [&](std::ostream& os) {
        io::write_histogram_csv(os, rep.belief_histogram);
      });
  }
  if (a.json)
    std::cout << j.dump(2) << '\n';
  else
    io::print_report(std::cout, rep);
  return rep.passed() ? kExitPass : kExitFail;
}

// ---- constants -----------------------------------------------------------

int cmd_constants(bool json) {
  const auto& c = golden::constants();
  if (json) {
    std::cout << io::to_json(c).dump(2) << '\n';
  } else {
    io::print_constants(std::cout, c);
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapdoor channel with feedback: dynamic program, closed-form "
               "verification and zero-error codec"};
  app.set_config("--config", "", "Read flags from a TOML/INI file");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Value iteration and greedy simulation");
  s->add_option("--grid", solve.grid, "Belief grid points")
      ->check(CLI::Range(2, 1 << 24));
  s->add_option("--actions", solve.actions, "Action grid points per axis")
      ->check(CLI::Range(2, 1 << 24));
  s->add_option("--iters", solve.iters, "Value iterations")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--steps", solve.steps, "Simulated belief steps");
  s->add_option("--seed", solve.seed, "Root seed");
  s->add_option("--threads", solve.threads, "Worker threads (0 = all)");
  s->add_option("--out", solve.out, "Output directory");
  s->add_flag("--json", solve.json, "JSON summary on stdout");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check the closed-form fixed point");
  v->add_option("--grid", verify.grid, "Belief grid points")
      ->check(CLI::Range(2, 1 << 24));
  v->add_option("--actions", verify.actions, "Action grid points per axis")
      ->check(CLI::Range(2, 1 << 24));
  v->add_option("--iters", verify.iters, "Shifted iterations")
      ->check(CLI::PositiveNumber);
  v->add_option("--rho", verify.rho, "Override the shift (negative control)");
  v->add_option("--threads", verify.threads, "Worker threads (0 = all)");
  v->add_option("--out", verify.out, "Output directory");
  v->add_flag("--json", verify.json, "JSON report on stdout");

  CodecArgs codec_args;
  auto* c = app.add_subcommand("codec", "Encode, transmit and decode one block");
  c->add_option("--message", codec_args.message, "Message index");
  c->add_option("--N", codec_args.n, "Block length");
  c->add_option("--seed", codec_args.seed, "Channel noise seed");
  c->add_option("--state", codec_args.state, "Initial channel state")
      ->check(CLI::Range(0, 1));
  c->add_flag("--trace", codec_args.trace, "Print the backward decoding");
  c->add_option("--replay-output", codec_args.replay,
                "Decode this output word instead of simulating");
  c->add_flag("--json", codec_args.json, "JSON on stdout");

  SimulateArgs sim_args;
  auto* m = app.add_subcommand("simulate", "Run a seeded experiment");
  m->add_option("--mode", sim_args.mode,
                "dp-sim, codec-roundtrip, flush or rate-table")
      ->required();
  m->add_option("--seed", sim_args.cfg.seed, "Root seed");
  m->add_option("--N", sim_args.cfg.block_length, "Block length");
  m->add_option("--trials", sim_args.cfg.trials, "Trials");
  m->add_option("--grid", sim_args.cfg.grid_size, "Belief grid points");
  m->add_option("--actions", sim_args.cfg.action_grid, "Action grid points");
  m->add_option("--iters", sim_args.cfg.iterations, "Value iterations");
  m->add_option("--steps", sim_args.cfg.steps, "Belief chain steps");
  m->add_flag("--conjectured", sim_args.cfg.conjectured_policy,
              "Use the closed-form policy in dp-sim");
  m->add_option("--z0", sim_args.z0, "Initial belief for dp-sim");
  m->add_flag("--exhaustive", sim_args.cfg.exhaustive,
              "All messages and both initial states");
  m->add_option("--threads", sim_args.cfg.threads, "Worker threads (0 = all)");
  m->add_option("--out", sim_args.out, "Output directory");
  m->add_flag("--json", sim_args.json, "JSON report on stdout");
  m->add_flag("--timing", sim_args.timing, "Include wall clock in JSON");

  bool constants_json = false;
  auto* k = app.add_subcommand("constants", "Print the golden-ratio constants");
  k->add_flag("--json", constants_json, "JSON on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*v) return cmd_verify(verify);
    if (*c) return cmd_codec(codec_args);
    if (*m) return cmd_simulate(sim_args);
    if (*k) return cmd_constants(constants_json);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
