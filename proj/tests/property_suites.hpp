#pragma once

// Randomized invariant suites shared by the unit tests and the acceptance
// runner. Each suite runs `cases` independent random inputs from a fixed
// seed and reports how many violated the property.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ratewatch/detector.hpp"
#include "ratewatch/device_model.hpp"
#include "ratewatch/io.hpp"
#include "ratewatch/sim.hpp"

namespace ratewatch::props {

struct PropResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0; }
};

namespace detail {

inline void record(PropResult& r, int case_no, const std::string& what) {
    ++r.failures;
    if (r.first_failure.empty()) {
        r.first_failure = "case " + std::to_string(case_no) + ": " + what;
    }
}

// Plateaus at realistic delivery rates with per-sample jitter; roughly one
// sample in five jumps far enough to land in a different 0.1 Hz bucket.
inline RateSeries random_series(std::mt19937_64& rng) {
    static constexpr double kLevels[] = {1, 5, 15, 20, 52, 100, 206, 416};
    std::uniform_int_distribution<int> total(3, 80);
    std::uniform_int_distribution<int> plateau(1, 12);
    std::uniform_int_distribution<int> level(0, 7);
    std::uniform_real_distribution<double> narrow(-0.04, 0.04);
    std::uniform_real_distribution<double> wide(-0.35, 0.35);
    std::uniform_int_distribution<int64_t> gap(1'000'000, 60'000'000);

    RateSeries s;
    s.sensor = Sensor::Accelerometer;
    const int n = total(rng);
    int64_t t = 0;
    while (static_cast<int>(s.points.size()) < n) {
        const double base = kLevels[level(rng)];
        const int len = plateau(rng);
        for (int i = 0; i < len && static_cast<int>(s.points.size()) < n; ++i) {
            t += gap(rng);
            const double j = rng() % 5 == 0 ? wide(rng) : narrow(rng);
            s.points.push_back({t, std::max(0.1, base + j)});
        }
    }
    return s;
}

inline bool same_points(const RateSeries& a, const RateSeries& b) {
    if (a.points.size() != b.points.size()) return false;
    for (size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].t_ns != b.points[i].t_ns) return false;
        if (a.points[i].rate != b.points[i].rate) return false;
    }
    return true;
}

inline std::string random_word(std::mt19937_64& rng) {
    static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<size_t> pick(0, sizeof(kChars) - 2);
    std::string out;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) out += kChars[pick(rng)];
    return out;
}

inline RateRequest random_request(std::mt19937_64& rng) {
    static constexpr DelayConstant kConstants[] = {
        DelayConstant::Normal, DelayConstant::Ui, DelayConstant::Game,
        DelayConstant::Fastest};
    const bool permission = rng() % 2 == 0;
    if (rng() % 2 == 0) return RateRequest::named(kConstants[rng() % 4], permission);
    std::uniform_real_distribution<double> hz(0.2, 500.0);
    return RateRequest::custom(hz(rng), permission);
}

}  // namespace detail

// clean(clean(x)) == clean(x), bit for bit.
inline PropResult cleaning_idempotent(int cases, uint64_t seed) {
    PropResult r{"cleaning is idempotent", cases, 0, ""};
    std::mt19937_64 rng(seed);
    for (int i = 0; i < cases; ++i) {
        const RateSeries raw = detail::random_series(rng);
        const RateSeries once = clean_outliers(raw, 0.1);
        const RateSeries twice = clean_outliers(once, 0.1);
        if (!detail::same_points(once, twice)) {
            detail::record(r, i,
                           "clean(clean(x)) differs from clean(x) on " +
                               std::to_string(raw.points.size()) + " points");
        }
    }
    return r;
}

// After cleaning, every interior run of equal 0.1 Hz buckets spans at least
// 3 samples; only the first and last runs may be shorter.
inline PropResult interior_runs_long(int cases, uint64_t seed) {
    PropResult r{"interior runs span >= 3 samples", cases, 0, ""};
    std::mt19937_64 rng(seed);
    for (int i = 0; i < cases; ++i) {
        const RateSeries cleaned = clean_outliers(detail::random_series(rng), 0.1);
        const auto& pts = cleaned.points;
        std::vector<int> run_len;
        for (size_t a = 0; a < pts.size();) {
            size_t b = a;
            const long bucket = std::lround(pts[a].rate / 0.1);
            while (b < pts.size() && std::lround(pts[b].rate / 0.1) == bucket) ++b;
            run_len.push_back(static_cast<int>(b - a));
            a = b;
        }
        for (size_t k = 1; k + 1 < run_len.size(); ++k) {
            if (run_len[k] < 3) {
                detail::record(r, i,
                               "run " + std::to_string(k) + " of " +
                                   std::to_string(run_len.size()) + " has length " +
                                   std::to_string(run_len[k]));
                break;
            }
        }
    }
    return r;
}

// Delivery arbitration returns the maximum granted rate, never decreases
// when a grant is added, and always lands on a supported rate.
inline PropResult arbitration_monotonic(int cases, uint64_t seed) {
    PropResult r{"arbitration is max and monotonic", cases, 0, ""};
    std::mt19937_64 rng(seed);
    const std::vector<DeviceProfile>& builtins = builtin_profiles();
    for (int i = 0; i < cases; ++i) {
        const DeviceProfile& profile = builtins[rng() % builtins.size()];
        const Sensor sensor = kAllSensors[rng() % kAllSensors.size()];
        std::vector<Hz> granted;
        const int m = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < m; ++k) {
            granted.push_back(resolve_request(profile, sensor, detail::random_request(rng)));
        }
        const Hz got = arbitrate(profile, sensor, granted);
        const Hz want = *std::max_element(granted.begin(), granted.end());
        if (got != want) {
            detail::record(r, i,
                           profile.name() + ": arbitrated " + std::to_string(got) +
                               ", max grant is " + std::to_string(want));
            continue;
        }
        const auto& supported = profile.caps(sensor).supported_rates;
        if (std::find(supported.begin(), supported.end(), got) == supported.end()) {
            detail::record(r, i,
                           profile.name() + ": arbitrated rate " + std::to_string(got) +
                               " is not a supported rate");
            continue;
        }
        granted.push_back(resolve_request(profile, sensor, detail::random_request(rng)));
        if (arbitrate(profile, sensor, granted) < got) {
            detail::record(r, i, profile.name() + ": adding a grant lowered the rate");
        }
    }
    return r;
}

namespace detail {

inline std::map<Sensor, SensorEventTrace> random_traces(std::mt19937_64& rng) {
    std::map<Sensor, SensorEventTrace> traces;
    std::uniform_int_distribution<int> events(1, 40);
    std::uniform_int_distribution<int64_t> gap(1, 1'000'000'000);
    for (Sensor s : kAllSensors) {
        if (rng() % 3 == 0) continue;
        SensorEventTrace trace;
        trace.sensor = s;
        int64_t t = static_cast<int64_t>(rng() % 1000);
        const int n = events(rng);
        for (int i = 0; i < n; ++i) {
            t += gap(rng);
            trace.timestamps_ns.push_back(t);
        }
        traces[s] = std::move(trace);
    }
    return traces;
}

inline GroundTruthLog random_truth(std::mt19937_64& rng) {
    static constexpr UsagePhase kStates[] = {
        UsagePhase::Baseline, UsagePhase::Foreground, UsagePhase::Background,
        UsagePhase::PostTermination, UsagePhase::Unknown};
    std::uniform_real_distribution<double> duration(1.0, 2000.0);
    std::uniform_real_distribution<double> rate(0.5, 500.0);
    GroundTruthLog t;
    t.scenario = random_word(rng);
    t.device = random_word(rng);
    t.duration_s = duration(rng);
    t.seed = rng();
    if (rng() % 2 == 0) t.phases = standard_phase_timeline();
    for (Sensor s : kAllSensors) {
        if (rng() % 2 == 0) continue;
        int64_t t_ns = static_cast<int64_t>(rng() % 1'000'000);
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            GroundTruthInterval gt;
            gt.start_ns = t_ns;
            t_ns += 1 + static_cast<int64_t>(rng() % 30'000'000'000LL);
            gt.end_ns = t_ns;
            t_ns += static_cast<int64_t>(rng() % 1'000'000'000);
            gt.rate_hz = rate(rng);
            const int apps = static_cast<int>(rng() % 3);
            for (int a = 0; a < apps; ++a) gt.app_ids.push_back(random_word(rng));
            gt.state = kStates[rng() % 5];
            t.intervals[s].push_back(std::move(gt));
        }
    }
    return t;
}

inline UsageReport random_report(std::mt19937_64& rng) {
    static constexpr UsagePhase kPhases[] = {
        UsagePhase::Baseline, UsagePhase::Foreground, UsagePhase::Background,
        UsagePhase::PostTermination, UsagePhase::Unknown};
    static constexpr DelayConstant kConstants[] = {
        DelayConstant::Normal, DelayConstant::Ui, DelayConstant::Game,
        DelayConstant::Fastest};
    std::uniform_real_distribution<double> rate(0.5, 500.0);
    UsageReport r;
    r.device = random_word(rng);
    r.min_duration_ms = 50 + static_cast<int>(rng() % 450);
    for (Sensor s : kAllSensors) {
        if (rng() % 3 == 0) continue;
        SensorFinding f;
        f.threshold_hz = rate(rng);
        f.insufficient = rng() % 8 == 0;
        int64_t t_ns = static_cast<int64_t>(rng() % 1'000'000);
        const int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            UsageInterval iv;
            iv.sensor = s;
            iv.start_ns = t_ns;
            t_ns += 1 + static_cast<int64_t>(rng() % 30'000'000'000LL);
            iv.end_ns = t_ns;
            t_ns += 1 + static_cast<int64_t>(rng() % 1'000'000'000);
            iv.estimated_rate = rate(rng);
            if (rng() % 2 == 0) iv.classified.constant = kConstants[rng() % 4];
            iv.classified.nearest_hz = iv.estimated_rate;
            iv.phase = kPhases[rng() % 5];
            f.intervals.push_back(std::move(iv));
        }
        r.sensors[s] = std::move(f);
    }
    const int notes = static_cast<int>(rng() % 3);
    for (int i = 0; i < notes; ++i) r.notes.push_back(random_word(rng));
    return r;
}

}  // namespace detail

// Traces round trip exactly; ground truth and report documents are canonical:
// writing what was parsed reproduces the document byte for byte.
inline PropResult files_round_trip(int cases, uint64_t seed) {
    PropResult r{"file formats round trip", cases, 0, ""};
    std::mt19937_64 rng(seed);
    for (int i = 0; i < cases; ++i) {
        const auto traces = detail::random_traces(rng);
        std::istringstream trace_in(write_trace_csv(traces));
        const auto traces_back = parse_trace_csv(trace_in);
        bool traces_equal = traces.size() == traces_back.size();
        if (traces_equal) {
            for (const auto& [s, trace] : traces) {
                const auto it = traces_back.find(s);
                if (it == traces_back.end() ||
                    it->second.timestamps_ns != trace.timestamps_ns ||
                    it->second.sensor != s) {
                    traces_equal = false;
                    break;
                }
            }
        }
        if (!traces_equal) {
            detail::record(r, i, "trace CSV did not round trip");
            continue;
        }

        const std::string truth_doc = write_ground_truth(detail::random_truth(rng));
        std::istringstream truth_in(truth_doc);
        if (write_ground_truth(parse_ground_truth(truth_in)) != truth_doc) {
            detail::record(r, i, "ground truth document is not canonical");
            continue;
        }

        const std::string report_doc = write_report(detail::random_report(rng));
        std::istringstream report_in(report_doc);
        if (write_report(parse_report(report_in)) != report_doc) {
            detail::record(r, i, "report document is not canonical");
        }
    }
    return r;
}

inline std::vector<PropResult> run_all(int cases, uint64_t seed) {
    return {cleaning_idempotent(cases, seed),
            interior_runs_long(cases, seed + 1),
            arbitration_monotonic(cases, seed + 2),
            files_round_trip(cases, seed + 3)};
}

}  // namespace ratewatch::props
