// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Tolerances and budgets are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "property_suites.hpp"
#include "ratewatch/harness.hpp"
#include "ratewatch/io.hpp"
#include "ratewatch/profiler.hpp"

using namespace ratewatch;

namespace {

constexpr double kSuiteWallLimitS = 5.0;    // 50-app standard suite
constexpr double kIdleWallLimitS = 30.0;    // 10 idle half-hour scenarios
constexpr double kProbeWallLimitS = 10.0;   // simulated profiling, all devices
constexpr double kRateTolHz = 0.5;          // detected vs delivered rate
constexpr double kMaeLimitHz = 0.4;         // mean absolute rate error
constexpr int kPropertyCases = 1000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << v;
    return out.str();
}

const DeviceProfile& builtin(const std::string& name) {
    const DeviceProfile* p = find_builtin(name);
    if (!p) throw InvariantError("missing builtin profile " + name);
    return *p;
}

// Criterion 1: a 50-app population through the standard observation
// procedure, every scripted usage found, nothing invented, within budget.
Outcome fifty_app_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteResult suite =
        run_standard_suite(game_rate_population(50), builtin("OnePlus Nord N200"), 20260816);
    const double wall = seconds_since(t0);

    int not_found = 0, flagged = 0;
    for (const ScenarioScore& sc : suite.eval.per_scenario) {
        if (!sc.all_found) ++not_found;
        if (!sc.baseline_clean) ++flagged;
    }
    Outcome o;
    o.pass = suite.eval.fn == 0 && suite.eval.fp == 0 && not_found == 0 &&
             flagged == 0 && wall < kSuiteWallLimitS;
    o.detail = "50 apps, fn=" + std::to_string(suite.eval.fn) +
               " fp=" + std::to_string(suite.eval.fp) +
               " unfound=" + std::to_string(not_found) +
               " flagged=" + std::to_string(flagged) + ", " + fmt(wall) + " s (limit " +
               fmt(kSuiteWallLimitS) + " s)";
    return o;
}

// Criterion 2: half-hour idle traces never produce a detection.
Outcome idle_is_silent() {
    const auto t0 = std::chrono::steady_clock::now();
    int detections = 0;
    for (int i = 0; i < 10; ++i) {
        Scenario s = *canned_scenario("no_usage");
        s.seed = 9000 + static_cast<uint64_t>(i);
        const SimulationResult sim = simulate(s);
        const UsageReport report = detect_all(sim.traces, s.profile);
        for (const auto& [sensor, finding] : report.sensors) {
            detections += static_cast<int>(finding.intervals.size());
        }
    }
    const double wall = seconds_since(t0);
    Outcome o;
    o.pass = detections == 0 && wall < kIdleWallLimitS;
    o.detail = "10 x 1800 s idle, " + std::to_string(detections) + " detections, " +
               fmt(wall) + " s (limit " + fmt(kIdleWallLimitS) + " s)";
    return o;
}

// Criterion 3: the detection threshold is exactly f_min + 0.5 Hz on every
// sensor of every builtin device.
Outcome thresholds_exact() {
    int checked = 0, wrong = 0;
    for (const DeviceProfile& p : builtin_profiles()) {
        const DetectionThreshold thresholds = thresholds_for(p);
        for (const auto& [sensor, caps] : p.sensors()) {
            ++checked;
            if (thresholds.at(sensor) != caps.f_min + 0.5) ++wrong;
        }
    }
    Outcome o;
    o.pass = wrong == 0 && checked > 0;
    o.detail = std::to_string(checked) + " sensor thresholds, " + std::to_string(wrong) +
               " off the f_min + 0.5 Hz rule";
    return o;
}

// Criterion 4: the probing sweep recovers every builtin f_min exactly from
// simulated event streams.
Outcome probing_recovers_f_min() {
    const auto t0 = std::chrono::steady_clock::now();
    int devices = 0, mismatches = 0;
    for (const DeviceProfile& p : builtin_profiles()) {
        ++devices;
        ProbePlan plan;
        std::vector<Sensor> sensors;
        for (const auto& [sensor, caps] : p.sensors()) sensors.push_back(sensor);
        const ProfileMeasurement m =
            profile_device(simulated_probe(p, plan.dwell_s, 20260816), plan, sensors);
        if (!m.unprofiled.empty()) {
            ++mismatches;
            continue;
        }
        for (const auto& [sensor, caps] : p.sensors()) {
            if (m.f_min.at(sensor) != caps.f_min) ++mismatches;
        }
    }
    const double wall = seconds_since(t0);
    Outcome o;
    o.pass = mismatches == 0 && wall < kProbeWallLimitS;
    o.detail = std::to_string(devices) + " devices, " + std::to_string(mismatches) +
               " mismatched minima, " + fmt(wall) + " s (limit " + fmt(kProbeWallLimitS) +
               " s)";
    return o;
}

// Criterion 5: fastest-rate requests deliver the capped rate without the
// high-rate permission and the full rate with it; uncapped devices ignore it.
Outcome permission_gates_fastest() {
    struct Probe {
        const char* device;
        bool permission;
        double expect;
    };
    const Probe probes[] = {
        {"OnePlus Nord N200", true, 416.0},
        {"OnePlus Nord N200", false, 206.0},
        {"Samsung Galaxy S9", true, 416.0},
        {"Samsung Galaxy S9", false, 416.0},
    };
    std::string failures;
    for (const Probe& probe : probes) {
        const DeviceProfile& p = builtin(probe.device);
        const RateRequest req =
            RateRequest::named(DelayConstant::Fastest, probe.permission);
        const Hz resolved = resolve_request(p, Sensor::Accelerometer, req);

        Scenario s = make_scenario(p, 20.0, probe.permission ? 501 : 502);
        SimApp app;
        app.id = "burst";
        app.registrations.push_back({Sensor::Accelerometer, req, 2.0, 18.0});
        s.apps = {app};
        const SimulationResult sim = simulate(s);
        const UsageReport report = detect_all(sim.traces, p);
        const auto& ivs = report.sensors.at(Sensor::Accelerometer).intervals;
        const Hz detected = ivs.size() == 1 ? ivs[0].estimated_rate : -1.0;

        if (resolved != probe.expect || std::fabs(detected - probe.expect) > kRateTolHz) {
            failures += std::string(" [") + probe.device +
                        (probe.permission ? " +perm" : " -perm") + " resolved " +
                        fmt(resolved) + " detected " + fmt(detected) + " expected " +
                        fmt(probe.expect) + "]";
        }
    }
    Outcome o;
    o.pass = failures.empty();
    o.detail = failures.empty()
                   ? "416/206 with and without permission, detected within " +
                         fmt(kRateTolHz) + " Hz"
                   : "mismatches:" + failures;
    return o;
}

// Criterion 6: estimated rates across 100 scenarios cycling the named
// delivery rates stay within the MAE budget.
Outcome rate_error_budget() {
    static constexpr double kCycle[] = {5, 15, 20, 52, 100, 206, 416};
    const DeviceProfile& s9 = builtin("Samsung Galaxy S9");
    std::vector<ScenarioScore> scores;
    for (int i = 0; i < 100; ++i) {
        Scenario s = make_scenario(s9, 30.0, 4000 + static_cast<uint64_t>(i));
        s.name = "cycle_" + std::to_string(i);
        SimApp app;
        app.id = "cycle";
        app.registrations.push_back({Sensor::Accelerometer,
                                     RateRequest::custom(kCycle[i % 7], true), 5.0, 25.0});
        s.apps = {app};
        const SimulationResult sim = simulate(s);
        const UsageReport report = detect_all(sim.traces, s9);
        scores.push_back(score_report(report, sim.truth));
    }
    const EvaluationResult ev = combine_scores(std::move(scores));
    Outcome o;
    o.pass = ev.fn == 0 && ev.fp == 0 && ev.rate_mae_hz <= kMaeLimitHz;
    o.detail = "100 scenarios, rate MAE " + fmt(ev.rate_mae_hz) + " Hz (limit " +
               fmt(kMaeLimitHz) + "), fn=" + std::to_string(ev.fn) +
               " fp=" + std::to_string(ev.fp);
    return o;
}

// Criterion 7: the case signature scenarios reproduce their documented
// shapes through the full simulate-detect pipeline.
Outcome case_signatures_hold() {
    int cases = 0, failed = 0;
    std::string first;
    for (const CaseScenario& c : case_signature_scenarios()) {
        ++cases;
        const SimulationResult sim = simulate(c.scenario);
        const UsageReport report = detect_all(sim.traces, c.scenario.profile);
        const auto failures = check_case(c, report);
        if (!failures.empty()) {
            ++failed;
            if (first.empty()) first = failures.front();
        }
    }
    Outcome o;
    o.pass = failed == 0 && cases == 4;
    o.detail = std::to_string(cases) + " scenarios, " + std::to_string(failed) +
               " failed" + (first.empty() ? "" : " (" + first + ")");
    return o;
}

// Criterion 8: the randomized invariant suites hold case by case.
Outcome properties_hold() {
    const auto results = props::run_all(kPropertyCases, 0xACCE57);
    int failures = 0;
    std::string first;
    for (const props::PropResult& r : results) {
        failures += r.failures;
        if (!r.ok() && first.empty()) first = r.name + ": " + r.first_failure;
    }
    Outcome o;
    o.pass = failures == 0;
    o.detail = std::to_string(results.size()) + " suites x " +
               std::to_string(kPropertyCases) + " cases, " + std::to_string(failures) +
               " violations" + (first.empty() ? "" : " (" + first + ")");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria = {
        fifty_app_suite,       idle_is_silent,    thresholds_exact,
        probing_recovers_f_min, permission_gates_fastest, rate_error_budget,
        case_signatures_hold,  properties_hold,
    };
    bool all_pass = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        all_pass = all_pass && o.pass;
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": "
                  << o.detail << "\n";
    }
    return all_pass ? 0 : 1;
}
