#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "trapdoor/dp.hpp"
#include "trapdoor/golden.hpp"
#include "trapdoor/sim.hpp"

namespace trapdoor::io {

using Json = nlohmann::ordered_json;

/// First line of every CSV file, followed by a column header line:
///   # trapdoor-csv v1 <kind>
inline constexpr const char* kCsvVersion = "trapdoor-csv v1";

// CSV writers. Numbers are printed with 17 significant digits.

/// z,value
void write_value_csv(std::ostream& os, const dp::ValueFunction& v,
                     const std::string& kind = "value_function");
/// z,value,delta,gamma where value is the function the policy is greedy for.
void write_policy_csv(std::ostream& os, const dp::ValueFunction& v,
                      const dp::PolicyTable& p);
/// z,frequency
void write_histogram_csv(std::ostream& os, const std::vector<double>& hist);
/// iteration,z,value for h_0, h_1, ...
void write_iterates_csv(std::ostream& os,
                        const std::vector<dp::ValueFunction>& iterates);

Json to_json(const dp::ValueFunction& v);
Json to_json(const dp::ValueFunction& v, const dp::PolicyTable& p);
Json to_json(const golden::GoldenConstants& c);
Json to_json(const golden::FixedPointReport& r);
Json to_json(const golden::StationaryReport& r);
Json to_json(const sim::ExperimentConfig& c);
/// The wall clock is included only on request so that equal configurations
/// serialize to identical bytes.
Json to_json(const sim::ExperimentReport& r, bool include_timing = false);

/// Aligned text tables for terminals.
void print_report(std::ostream& os, const sim::ExperimentReport& r);
void print_report(std::ostream& os, const golden::FixedPointReport& r);
void print_report(std::ostream& os, const golden::StationaryReport& r);
void print_constants(std::ostream& os, const golden::GoldenConstants& c);

}  // namespace trapdoor::io
