#include "trapdoor/io.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>

namespace trapdoor::io {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_header(std::ostream& os, const std::string& kind,
                const std::string& columns) {
  os << "# " << kCsvVersion << ' ' << kind << '\n' << columns << '\n';
}

// NaN and infinities become null.
Json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json checks_json(const std::vector<golden::Check>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name},
                   {"measured", number_or_null(c.measured)},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}});
  return arr;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

void write_value_csv(std::ostream& os, const dp::ValueFunction& v,
                     const std::string& kind) {
  csv_header(os, kind, "z,value");
  for (int i = 0; i < v.grid_size(); ++i)
    os << num(v.z(i)) << ',' << num(v[i]) << '\n';
}

void write_policy_csv(std::ostream& os, const dp::ValueFunction& v,
                      const dp::PolicyTable& p) {
  csv_header(os, "policy", "z,value,delta,gamma");
  for (int i = 0; i < p.grid_size(); ++i)
    os << num(p.z(i)) << ',' << num(v[i]) << ',' << num(p[i].delta) << ','
       << num(p[i].gamma) << '\n';
}

void write_histogram_csv(std::ostream& os, const std::vector<double>& hist) {
  csv_header(os, "histogram", "z,frequency");
  const int n = static_cast<int>(hist.size());
  for (int i = 0; i < n; ++i)
    os << num(dp::ValueFunction::grid_point(i, n)) << ',' << num(hist[i])
       << '\n';
}

void write_iterates_csv(std::ostream& os,
                        const std::vector<dp::ValueFunction>& iterates) {
  csv_header(os, "iterates", "iteration,z,value");
  for (std::size_t k = 0; k < iterates.size(); ++k)
    for (int i = 0; i < iterates[k].grid_size(); ++i)
      os << k << ',' << num(iterates[k].z(i)) << ',' << num(iterates[k][i])
         << '\n';
}

Json to_json(const dp::ValueFunction& v) {
  Json z = Json::array(), val = Json::array();
  for (int i = 0; i < v.grid_size(); ++i) {
    z.push_back(v.z(i));
    val.push_back(v[i]);
  }
  return {{"schema", "trapdoor.value_function/1"},
          {"grid_size", v.grid_size()},
          {"z", z},
          {"value", val}};
}

Json to_json(const dp::ValueFunction& v, const dp::PolicyTable& p) {
  Json j = to_json(v);
  j["schema"] = "trapdoor.policy/1";
  Json d = Json::array(), g = Json::array();
  for (const auto& a : p.actions()) {
    d.push_back(a.delta);
    g.push_back(a.gamma);
  }
  j["delta"] = d;
  j["gamma"] = g;
  return j;
}

Json to_json(const golden::GoldenConstants& c) {
  return {{"phi", c.phi}, {"rho", c.rho}, {"b1", c.b1}, {"b2", c.b2},
          {"b3", c.b3},   {"b4", c.b4},   {"c1", c.c1}, {"c2", c.c2}};
}

Json to_json(const golden::FixedPointReport& r) {
  Json iters = Json::array();
  for (const auto& it : r.records)
    iters.push_back({{"iteration", it.iteration},
                     {"fixed_point_deviation", it.fixed_point_deviation},
                     {"max_increase", it.max_increase},
                     {"sup_difference", it.sup_difference}});
  return {{"schema", "trapdoor.verify/1"},
          {"grid_size", r.grid_size},
          {"action_grid", r.action_grid},
          {"iterations", r.iterations},
          {"grid_spacing", r.grid_spacing},
          {"rho_used", r.rho_used},
          {"rho_error", r.rho_error},
          {"bellman_residual", r.bellman_residual},
          {"self_residual", r.self_residual},
          {"argmax_at_b2",
           {{"delta", r.argmax_at_b2.delta}, {"gamma", r.argmax_at_b2.gamma}}},
          {"per_iteration", iters},
          {"checks", checks_json(r.checks)},
          {"passed", r.passed()}};
}

Json to_json(const golden::StationaryReport& r) {
  Json trans = Json::array();
  for (const auto& t : r.transitions)
    trans.push_back({{"from", t.from},
                     {"output", to_int(t.output)},
                     {"probability", t.probability},
                     {"successor", t.successor},
                     {"to", t.to}});
  Json matrix = Json::array();
  for (const auto& row : r.matrix) matrix.push_back(row);
  return {{"schema", "trapdoor.stationary/1"},
          {"transitions", trans},
          {"closed", r.closed},
          {"matrix", matrix},
          {"stationary", r.stationary},
          {"rewards", r.rewards},
          {"expected_reward", r.expected_reward},
          {"reward_error", r.reward_error},
          {"irreducible_aperiodic", r.irreducible_aperiodic},
          {"checks", checks_json(r.checks)},
          {"passed", r.passed()}};
}

Json to_json(const sim::ExperimentConfig& c) {
  Json j = {{"mode", std::string(sim::mode_name(c.mode))},
            {"seed", c.seed},
            {"block_length", c.block_length},
            {"trials", c.trials},
            {"grid_size", c.grid_size},
            {"action_grid", c.action_grid},
            {"iterations", c.iterations},
            {"steps", c.steps},
            {"conjectured_policy", c.conjectured_policy},
            {"exhaustive", c.exhaustive}};
  j["z0"] = c.z0 ? Json(*c.z0) : Json(nullptr);
  return j;
}

Json to_json(const sim::ExperimentReport& r, bool include_timing) {
  Json j;
  j["schema"] = "trapdoor.report/1";
  j["mode"] = std::string(sim::mode_name(r.config.mode));
  j["config"] = to_json(r.config);
  Json m = Json::object();
  for (const auto& x : r.measurements)
    m[x.name] = x.value ? number_or_null(*x.value) : Json(nullptr);
  j["measurements"] = m;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"measured", number_or_null(c.measured)},
                      {"reference", number_or_null(c.reference)},
                      {"lower", number_or_null(c.lower)},
                      {"upper", number_or_null(c.upper)},
                      {"passed", c.passed}});
  j["checks"] = checks;
  if (!r.rate_table.empty()) {
    Json rows = Json::array();
    for (const auto& row : r.rate_table)
      rows.push_back({{"N", row.block_length},
                      {"codebook_size", row.codebook_size},
                      {"rate", row.rate},
                      {"gap", row.gap}});
    j["rate_table"] = rows;
  }
  if (!r.flush_histogram.empty()) j["flush_histogram"] = r.flush_histogram;
  if (!r.failures.empty()) j["failures"] = r.failures;
  j["passed"] = r.passed();
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

void print_report(std::ostream& os, const sim::ExperimentReport& r) {
  os << "mode: " << sim::mode_name(r.config.mode) << "  seed: " << r.config.seed
     << '\n';
  for (const auto& m : r.measurements) {
    os << "  " << std::left << std::setw(28) << m.name << ' ';
    if (m.value)
      os << num(*m.value);
    else
      os << "undefined";
    os << '\n';
  }
  if (!r.rate_table.empty()) {
    os << "  " << std::right << std::setw(4) << "N" << std::setw(22)
       << "codebook_size" << std::setw(12) << "rate" << std::setw(12) << "gap"
       << '\n';
    for (const auto& row : r.rate_table)
      os << "  " << std::setw(4) << row.block_length << std::setw(22)
         << row.codebook_size << std::setw(12) << std::fixed
         << std::setprecision(6) << row.rate << std::setw(12) << row.gap
         << std::defaultfloat << '\n';
  }
  for (const auto& f : r.failures) os << "  failure: " << f << '\n';
  for (const auto& c : r.checks)
    os << "  [" << pass_fail(c.passed) << "] " << std::left << std::setw(30)
       << c.name << " measured " << num(c.measured) << " in [" << num(c.lower)
       << ", " << num(c.upper) << "]\n";
  os << "  wall clock: " << std::fixed << std::setprecision(3)
     << r.wall_clock_seconds << " s" << std::defaultfloat << '\n';
  os << (r.passed() ? "PASS" : "FAIL") << '\n';
}

void print_report(std::ostream& os, const golden::FixedPointReport& r) {
  os << "grid " << r.grid_size << "  action grid " << r.action_grid
     << "  iterations " << r.iterations << "  rho " << num(r.rho_used) << '\n';
  os << "  " << std::right << std::setw(4) << "k" << std::setw(16)
     << "deviation" << std::setw(16) << "max_increase" << std::setw(16)
     << "sup_diff" << '\n';
  os << std::scientific << std::setprecision(3);
  for (const auto& it : r.records)
    os << "  " << std::setw(4) << it.iteration << std::setw(16)
       << it.fixed_point_deviation << std::setw(16) << it.max_increase
       << std::setw(16) << it.sup_difference << '\n';
  os << std::defaultfloat;
  os << "  bellman residual " << num(r.bellman_residual) << "  self residual "
     << num(r.self_residual) << '\n';
  for (const auto& c : r.checks)
    os << "  [" << pass_fail(c.passed) << "] " << std::left << std::setw(30)
       << c.name << " " << num(c.measured) << " <= " << num(c.tolerance)
       << '\n';
  os << std::right;
}

void print_report(std::ostream& os, const golden::StationaryReport& r) {
  const char* names[] = {"b1", "b2", "b3", "b4"};
  for (const auto& t : r.transitions)
    os << "  " << names[t.from] << " --y=" << to_char(t.output) << " (p="
       << num(t.probability) << ")--> "
       << (t.to >= 0 ? names[t.to] : "outside") << '\n';
  os << "  stationary:";
  for (double p : r.stationary) os << ' ' << num(p);
  os << "\n  expected reward " << num(r.expected_reward) << '\n';
  for (const auto& c : r.checks)
    os << "  [" << pass_fail(c.passed) << "] " << c.name << " " << num(c.measured)
       << " <= " << num(c.tolerance) << '\n';
}

void print_constants(std::ostream& os, const golden::GoldenConstants& c) {
  os << "phi " << num(c.phi) << '\n'
     << "rho " << num(c.rho) << '\n'
     << "b1  " << num(c.b1) << '\n'
     << "b2  " << num(c.b2) << '\n'
     << "b3  " << num(c.b3) << '\n'
     << "b4  " << num(c.b4) << '\n'
     << "c1  " << num(c.c1) << '\n'
     << "c2  " << num(c.c2) << '\n';
}

}  // namespace trapdoor::io
