#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ratewatch/detector.hpp"
#include "ratewatch/device_model.hpp"
#include "ratewatch/sim.hpp"
#include "ratewatch/types.hpp"

namespace ratewatch {

// Interval-level comparison of one report against one ground-truth log.
// A detected interval and a ground-truth episode match when their overlap
// covers at least kMatchIou of their union.
inline constexpr double kMatchIou = 0.8;

// Episodes at or below the threshold are undetectable by construction
// (the monitor's own stream runs at f_min); they count as blind spots,
// not misses.
struct ScenarioScore {
    std::string scenario;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    int tn = 0;  // sensors with neither truth nor detections
    int blind_spots = 0;
    // Episodes comfortably above threshold (by > 0.4 Hz jitter margin) and at
    // least twice the minimum duration; these must never be missed.
    int strict_total = 0;
    int strict_matched = 0;
    int matched = 0;                  // == tp
    double rate_abs_err_sum = 0.0;    // over matched pairs
    double boundary_err_ms_sum = 0.0;
    bool baseline_clean = true;       // nothing detected before the app ran
    bool all_found = false;           // every non-blind episode matched

    bool has_truth = false;           // scenario contained at least one episode
};

struct EvaluationResult {
    std::vector<ScenarioScore> per_scenario;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    int tn = 0;
    int blind_spots = 0;
    int strict_total = 0;
    int strict_matched = 0;
    double rate_mae_hz = 0.0;
    double mean_boundary_err_ms = 0.0;

    double recall() const;         // tp / (tp + fn); 1.0 when nothing to find
    double precision() const;      // tp / (tp + fp); 1.0 when nothing detected
    double strict_recall() const;  // strict_matched / strict_total; 1.0 when empty
};

ScenarioScore score_report(const UsageReport& report, const GroundTruthLog& truth,
                           const DetectorConfig& config = {});
EvaluationResult combine_scores(std::vector<ScenarioScore> scores);

struct SuiteResult {
    std::vector<UsageReport> reports;   // phase-annotated when phases are known
    std::vector<GroundTruthLog> truths;
    EvaluationResult eval;
};

// Runs each app through the standard observation procedure on its own
// scenario (seed derived from `seed` and the app index), detects usage and
// scores the result.
SuiteResult run_standard_suite(const std::vector<SimApp>& apps,
                               const DeviceProfile& profile, uint64_t seed,
                               const DetectorConfig& config = {});

// Splits detected intervals along a phase timeline and tags each piece;
// pieces shorter than min_duration_ms fold into the adjacent piece. Without
// a timeline the phases stay Unknown.
UsageReport annotate_phases(const UsageReport& report,
                            const PhaseTimeline& phases,
                            const DetectorConfig& config = {});

struct FgBgStats {
    int apps_total = 0;
    int apps_with_usage = 0;
    int foreground_apps = 0;
    int background_apps = 0;
    int post_termination_apps = 0;
    // Background usage no faster than foreground and at least as long: the
    // keep-listening-quietly pattern.
    int decreasing_pattern_apps = 0;

    double background_fraction() const;  // background_apps / apps_with_usage
};

// Foreground/background split of phase-annotated reports.
FgBgStats fg_bg_breakdown(const std::vector<UsageReport>& reports);

// Per-sensor histogram of each report's peak detected rate, binned at the
// named delivery rates of the profile, a ~200 band around the high-rate cap,
// and "other".
struct RateHistogram {
    std::vector<std::string> bin_labels;  // ascending rate order, "other" last
    std::map<Sensor, std::vector<int>> counts;
    // Reports with no usage on the sensor; bins + no_usage = population.
    std::map<Sensor, int> no_usage;
};

RateHistogram rate_histogram(const std::vector<UsageReport>& reports,
                             const DeviceProfile& profile);

struct AggregateStats {
    int population = 0;
    std::map<Sensor, int> per_sensor_users;
    int any_sensor_users = 0;
    int all_three_users = 0;
    FgBgStats fg_bg;
    RateHistogram histogram;
};

AggregateStats aggregate_stats(const std::vector<UsageReport>& reports,
                               const DeviceProfile& profile);

// One self-checking scenario modeled on an access pattern seen in the wild.
struct CaseExpectation {
    Sensor sensor = Sensor::Accelerometer;
    int interval_count = -1;                     // -1: at least one
    std::optional<double> each_duration_s;       // with tolerance below
    double duration_tol_s = 0.05;
    // Expected classification sequence, in order; nullopt entry = Custom.
    std::vector<std::optional<DelayConstant>> constants_in_order;
    std::optional<Hz> custom_rate_hz;            // expected Custom rate
    double rate_tol_hz = 0.5;
    std::optional<double> last_end_after_s;      // usage must outlive this point
};

struct CaseScenario {
    Scenario scenario;
    std::string description;
    std::vector<CaseExpectation> expectations;
};

// Canned scenarios: a sub-second burst on all three sensors, a continuous
// ~20 Hz accelerometer stream, a page that steps from UI to GAME rate, and a
// registration that survives app termination. Defaults to the device with
// the high-rate cap quirk.
std::vector<CaseScenario> case_signature_scenarios();
std::vector<CaseScenario> case_signature_scenarios(const DeviceProfile& profile);

// Empty list = all expectations met; otherwise one message per failure.
std::vector<std::string> check_case(const CaseScenario& c, const UsageReport& report);

// Population builders for suite-level statistics.
//
// Every app requests at least GAME rate on at least one sensor for most of
// the observation window; detection must find all of them.
std::vector<SimApp> game_rate_population(int count);
// `background_count` of the apps keep their listener into the background
// phase; the rest stop before it. All request GAME on the accelerometer.
std::vector<SimApp> mixed_lifecycle_population(int count, int background_count);

}  // namespace ratewatch
