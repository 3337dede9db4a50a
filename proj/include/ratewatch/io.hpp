#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ratewatch/detector.hpp"
#include "ratewatch/harness.hpp"
#include "ratewatch/sim.hpp"
#include "ratewatch/types.hpp"

namespace ratewatch {

// Trace CSV: header `sensor,timestamp_ns`, one row per event, rows grouped
// by sensor and ascending in time within each sensor.
std::string write_trace_csv(const std::map<Sensor, SensorEventTrace>& traces);
std::map<Sensor, SensorEventTrace> parse_trace_csv(std::istream& in);
std::map<Sensor, SensorEventTrace> load_trace_file(const std::string& path);
void save_trace_file(const std::string& path,
                     const std::map<Sensor, SensorEventTrace>& traces);

// Ground truth JSON (see docs/formats.md).
std::string write_ground_truth(const GroundTruthLog& truth);
GroundTruthLog parse_ground_truth(std::istream& in);
GroundTruthLog load_ground_truth_file(const std::string& path);

// Report JSON. `metrics` is embedded when the caller scored the report.
std::string write_report(const UsageReport& report,
                         const EvaluationResult* metrics = nullptr);
UsageReport parse_report(std::istream& in);
UsageReport load_report_file(const std::string& path);

// Evaluation JSON for `evaluate` output.
std::string write_evaluation(const EvaluationResult& eval);

// Aggregate JSON + histogram CSV for `report` output.
std::string write_aggregate(const AggregateStats& stats);
std::string write_histogram_csv(const RateHistogram& histogram);

// Scenario text format (see docs/formats.md).
Scenario parse_scenario_text(std::istream& in);
Scenario load_scenario_file(const std::string& path);

// Canned scenario by name (the case signatures plus "standard_game" and
// "no_usage"); nullopt when the name is unknown.
std::optional<Scenario> canned_scenario(const std::string& name);
std::vector<std::string> canned_scenario_names();

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Entry point behind the ratewatch binary; exposed for tests.
// Exit codes: 0 success, 1 input error, 2 internal error.
int run_cli(int argc, const char* const* argv);

}  // namespace ratewatch
