#include "ratewatch/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace ratewatch {
namespace {

uint64_t suite_seed(uint64_t base, size_t index) {
    return base * 6364136223846793005ULL +
           1442695040888963407ULL * (static_cast<uint64_t>(index) + 1);
}

// One contiguous usage episode: time-adjacent ground-truth intervals fused.
struct Episode {
    int64_t start_ns = 0;
    int64_t end_ns = 0;
    Hz max_rate = 0.0;
    Hz min_rate = std::numeric_limits<double>::infinity();
};

std::vector<Episode> merge_truth(const std::vector<GroundTruthInterval>& intervals) {
    std::vector<Episode> out;
    for (const GroundTruthInterval& gt : intervals) {
        if (!out.empty() && out.back().end_ns == gt.start_ns) {
            Episode& ep = out.back();
            ep.end_ns = gt.end_ns;
            ep.max_rate = std::max(ep.max_rate, gt.rate_hz);
            ep.min_rate = std::min(ep.min_rate, gt.rate_hz);
        } else {
            out.push_back({gt.start_ns, gt.end_ns, gt.rate_hz, gt.rate_hz});
        }
    }
    return out;
}

struct Detection {
    int64_t start_ns = 0;
    int64_t end_ns = 0;
    Hz rate = 0.0;
};

// Phase annotation splits intervals at exact boundaries; fuse them back for
// interval-level matching.
std::vector<Detection> merged_detections(const SensorFinding& finding) {
    constexpr int64_t kRejoinGapNs = 2'000'000;  // well under the 500 ms merge gap
    std::vector<Detection> out;
    for (const UsageInterval& iv : finding.intervals) {
        if (!out.empty() && iv.start_ns - out.back().end_ns <= kRejoinGapNs) {
            out.back().end_ns = iv.end_ns;
            out.back().rate = std::max(out.back().rate, iv.estimated_rate);
        } else {
            out.push_back({iv.start_ns, iv.end_ns, iv.estimated_rate});
        }
    }
    return out;
}

double interval_iou(int64_t a0, int64_t a1, int64_t b0, int64_t b1) {
    const int64_t overlap = std::min(a1, b1) - std::max(a0, b0);
    if (overlap <= 0) return 0.0;
    const int64_t span = std::max(a1, b1) - std::min(a0, b0);
    return static_cast<double>(overlap) / static_cast<double>(span);
}

std::string fmt_rate_label(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw InvariantError("rate label formatting failed");
    return std::string(buf, ptr);
}

}  // namespace

double EvaluationResult::recall() const {
    return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double EvaluationResult::precision() const {
    return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double EvaluationResult::strict_recall() const {
    return strict_total == 0
               ? 1.0
               : static_cast<double>(strict_matched) / static_cast<double>(strict_total);
}

ScenarioScore score_report(const UsageReport& report, const GroundTruthLog& truth,
                           const DetectorConfig& config) {
    ScenarioScore sc;
    sc.scenario = truth.scenario;
    const int64_t min_duration_ns = int64_t(config.min_duration_ms) * 1'000'000;

    std::optional<PhaseWindow> baseline;
    if (truth.phases) {
        for (const PhaseWindow& w : *truth.phases) {
            if (w.phase == UsagePhase::Baseline) baseline = w;
        }
    }

    int nonblind_total = 0;
    int nonblind_matched = 0;
    for (Sensor sensor : kAllSensors) {
        const auto finding_it = report.sensors.find(sensor);
        const SensorFinding* finding =
            finding_it == report.sensors.end() ? nullptr : &finding_it->second;
        std::vector<Detection> dets =
            finding ? merged_detections(*finding) : std::vector<Detection>{};

        const auto truth_it = truth.intervals.find(sensor);
        std::vector<Episode> episodes = truth_it == truth.intervals.end()
                                            ? std::vector<Episode>{}
                                            : merge_truth(truth_it->second);
        if (dets.empty() && episodes.empty()) {
            ++sc.tn;
            continue;
        }
        sc.has_truth = sc.has_truth || !episodes.empty();
        const Hz threshold = finding ? finding->threshold_hz : 0.0;

        if (baseline && finding) {
            for (const Detection& d : dets) {
                if (d.start_ns < baseline->end_ns && d.end_ns > baseline->start_ns) {
                    sc.baseline_clean = false;
                }
            }
        }

        // Greedy one-to-one matching, best IoU first.
        struct Pair {
            double iou;
            size_t det, ep;
        };
        std::vector<Pair> pairs;
        for (size_t d = 0; d < dets.size(); ++d) {
            for (size_t e = 0; e < episodes.size(); ++e) {
                const double iou = interval_iou(dets[d].start_ns, dets[d].end_ns,
                                                episodes[e].start_ns, episodes[e].end_ns);
                if (iou >= kMatchIou) pairs.push_back({iou, d, e});
            }
        }
        std::sort(pairs.begin(), pairs.end(),
                  [](const Pair& a, const Pair& b) { return a.iou > b.iou; });
        std::vector<bool> det_used(dets.size(), false), ep_used(episodes.size(), false);
        for (const Pair& p : pairs) {
            if (det_used[p.det] || ep_used[p.ep]) continue;
            det_used[p.det] = true;
            ep_used[p.ep] = true;
            ++sc.tp;
            ++sc.matched;
            sc.rate_abs_err_sum +=
                std::fabs(dets[p.det].rate - episodes[p.ep].max_rate);
            const double start_err_ms =
                std::fabs(static_cast<double>(dets[p.det].start_ns -
                                              episodes[p.ep].start_ns)) / 1e6;
            const double end_err_ms =
                std::fabs(static_cast<double>(dets[p.det].end_ns -
                                              episodes[p.ep].end_ns)) / 1e6;
            sc.boundary_err_ms_sum += (start_err_ms + end_err_ms) / 2.0;
        }
        for (size_t d = 0; d < dets.size(); ++d) {
            if (!det_used[d]) ++sc.fp;
        }
        for (size_t e = 0; e < episodes.size(); ++e) {
            const Episode& ep = episodes[e];
            const bool blind = ep.max_rate <= threshold;
            if (!blind) {
                ++nonblind_total;
                if (ep_used[e]) ++nonblind_matched;
            }
            const bool strict = ep.min_rate > threshold + 0.4 &&
                                ep.end_ns - ep.start_ns >= 2 * min_duration_ns;
            if (strict) {
                ++sc.strict_total;
                if (ep_used[e]) ++sc.strict_matched;
            }
            if (ep_used[e]) continue;
            if (blind) {
                ++sc.blind_spots;
            } else {
                ++sc.fn;
            }
        }
    }
    sc.all_found = sc.has_truth && nonblind_total > 0 &&
                   nonblind_matched == nonblind_total;
    return sc;
}

EvaluationResult combine_scores(std::vector<ScenarioScore> scores) {
    EvaluationResult ev;
    double rate_err = 0.0, boundary_err = 0.0;
    int matched = 0;
    for (const ScenarioScore& sc : scores) {
        if (!sc.baseline_clean) continue;  // flagged run, excluded from totals
        ev.tp += sc.tp;
        ev.fp += sc.fp;
        ev.fn += sc.fn;
        ev.tn += sc.tn;
        ev.blind_spots += sc.blind_spots;
        ev.strict_total += sc.strict_total;
        ev.strict_matched += sc.strict_matched;
        rate_err += sc.rate_abs_err_sum;
        boundary_err += sc.boundary_err_ms_sum;
        matched += sc.matched;
    }
    ev.rate_mae_hz = matched == 0 ? 0.0 : rate_err / matched;
    ev.mean_boundary_err_ms = matched == 0 ? 0.0 : boundary_err / matched;
    ev.per_scenario = std::move(scores);
    return ev;
}

UsageReport annotate_phases(const UsageReport& report, const PhaseTimeline& phases,
                            const DetectorConfig& config) {
    const int64_t min_duration_ns = int64_t(config.min_duration_ms) * 1'000'000;
    UsageReport out = report;
    for (auto& [sensor, finding] : out.sensors) {
        std::vector<UsageInterval> annotated;
        for (const UsageInterval& iv : finding.intervals) {
            struct Piece {
                int64_t start, end;
                UsagePhase phase;
            };
            std::vector<Piece> pieces;
            for (const PhaseWindow& w : phases) {
                const int64_t s = std::max(iv.start_ns, w.start_ns);
                const int64_t e = std::min(iv.end_ns, w.end_ns);
                if (s < e) pieces.push_back({s, e, w.phase});
            }
            if (pieces.empty()) pieces.push_back({iv.start_ns, iv.end_ns, iv.phase});

            // Slivers from boundary spill (transition tails) join their
            // neighbor instead of claiming a phase of their own.
            for (size_t i = 0; i < pieces.size();) {
                if (pieces.size() > 1 && pieces[i].end - pieces[i].start < min_duration_ns) {
                    if (i > 0) {
                        pieces[i - 1].end = pieces[i].end;
                        pieces.erase(pieces.begin() + i);
                    } else {
                        pieces[i + 1].start = pieces[i].start;
                        pieces.erase(pieces.begin());
                    }
                } else {
                    ++i;
                }
            }
            for (size_t i = 1; i < pieces.size();) {
                if (pieces[i].phase == pieces[i - 1].phase &&
                    pieces[i].start == pieces[i - 1].end) {
                    pieces[i - 1].end = pieces[i].end;
                    pieces.erase(pieces.begin() + i);
                } else {
                    ++i;
                }
            }
            for (const Piece& p : pieces) {
                UsageInterval part = iv;
                part.start_ns = p.start;
                part.end_ns = p.end;
                part.phase = p.phase;
                annotated.push_back(part);
            }
        }
        finding.intervals = std::move(annotated);
    }
    return out;
}

SuiteResult run_standard_suite(const std::vector<SimApp>& apps,
                               const DeviceProfile& profile, uint64_t seed,
                               const DetectorConfig& config) {
    SuiteResult suite;
    std::vector<ScenarioScore> scores;
    const DetectionThreshold thresholds = thresholds_for(profile);
    for (size_t i = 0; i < apps.size(); ++i) {
        Scenario scenario =
            standard_procedure_scenario(apps[i], profile, suite_seed(seed, i));
        SimulationResult sim = simulate(scenario);
        UsageReport report = detect_all(sim.traces, profile, config);

        // Baseline sanity pass: the first 5 s must sit at the monitor's own
        // rate on every sensor, otherwise the run is flagged and not scored.
        bool baseline_ok = true;
        const int64_t baseline_end = seconds_to_ns(kBaselineSeconds);
        for (const auto& [sensor, trace] : sim.traces) {
            if (!thresholds.has(sensor)) continue;
            const RateSeries cleaned = clean_outliers(instant_rates(trace), config.bucket_hz);
            for (const RatePoint& p : cleaned.points) {
                if (p.t_ns >= baseline_end) break;
                if (p.rate > thresholds.at(sensor)) {
                    baseline_ok = false;
                    break;
                }
            }
        }

        if (scenario.phases) {
            report = annotate_phases(report, *scenario.phases, config);
        }
        ScenarioScore score = score_report(report, sim.truth, config);
        score.baseline_clean = score.baseline_clean && baseline_ok;
        scores.push_back(std::move(score));
        suite.reports.push_back(std::move(report));
        suite.truths.push_back(std::move(sim.truth));
    }
    suite.eval = combine_scores(std::move(scores));
    return suite;
}

double FgBgStats::background_fraction() const {
    return apps_with_usage == 0
               ? 0.0
               : static_cast<double>(background_apps) /
                     static_cast<double>(apps_with_usage);
}

FgBgStats fg_bg_breakdown(const std::vector<UsageReport>& reports) {
    FgBgStats st;
    st.apps_total = static_cast<int>(reports.size());
    for (const UsageReport& r : reports) {
        bool fg = false, bg = false, pt = false;
        double fg_duration = 0.0, bg_duration = 0.0;
        Hz fg_rate = 0.0, bg_rate = 0.0;
        for (const auto& [sensor, finding] : r.sensors) {
            for (const UsageInterval& iv : finding.intervals) {
                switch (iv.phase) {
                    case UsagePhase::Foreground:
                        fg = true;
                        fg_duration += iv.duration_s();
                        fg_rate = std::max(fg_rate, iv.estimated_rate);
                        break;
                    case UsagePhase::Background:
                        bg = true;
                        bg_duration += iv.duration_s();
                        bg_rate = std::max(bg_rate, iv.estimated_rate);
                        break;
                    case UsagePhase::PostTermination:
                        pt = true;
                        break;
                    default:
                        break;
                }
            }
        }
        if (r.any_usage()) ++st.apps_with_usage;
        if (fg) ++st.foreground_apps;
        if (bg) ++st.background_apps;
        if (pt) ++st.post_termination_apps;
        if (fg && bg && bg_rate <= fg_rate + 1e-9 && bg_duration + 1e-9 >= fg_duration) {
            ++st.decreasing_pattern_apps;
        }
    }
    return st;
}

RateHistogram rate_histogram(const std::vector<UsageReport>& reports,
                             const DeviceProfile& profile) {
    RateHistogram h;
    std::set<double> centers;
    std::set<double> caps;
    for (const auto& [sensor, caps_entry] : profile.sensors()) {
        for (const auto& [c, v] : caps_entry.constant_map) centers.insert(v);
        if (caps_entry.cap_unpermitted) caps.insert(*caps_entry.cap_unpermitted);
    }
    const std::optional<double> cap =
        caps.empty() ? std::nullopt : std::optional<double>(*caps.begin());

    struct Bin {
        std::string label;
        double center;
        bool is_band;
    };
    std::vector<Bin> bins;
    for (double c : centers) bins.push_back({fmt_rate_label(c), c, false});
    if (cap) {
        const double band_center = static_cast<double>(std::llround(*cap / 100.0)) * 100.0;
        Bin band{"~" + fmt_rate_label(band_center), *cap, true};
        auto pos = std::find_if(bins.begin(), bins.end(),
                                [&](const Bin& b) { return b.center > *cap; });
        bins.insert(pos, band);
    }
    bins.push_back({"other", 0.0, false});

    for (const Bin& b : bins) h.bin_labels.push_back(b.label);
    for (const auto& [sensor, unused] : profile.sensors()) {
        h.counts[sensor] = std::vector<int>(bins.size(), 0);
        h.no_usage[sensor] = 0;
    }

    for (const UsageReport& r : reports) {
        for (const auto& [sensor, unused] : profile.sensors()) {
            auto it = r.sensors.find(sensor);
            Hz peak = 0.0;
            bool used = false;
            if (it != r.sensors.end()) {
                for (const UsageInterval& iv : it->second.intervals) {
                    peak = std::max(peak, iv.estimated_rate);
                    used = true;
                }
            }
            if (!used) {
                ++h.no_usage[sensor];
                continue;
            }
            size_t chosen = bins.size() - 1;  // "other"
            for (size_t i = 0; i + 1 < bins.size(); ++i) {
                if (bins[i].is_band ? std::fabs(peak - bins[i].center) <= 10.0
                                    : std::fabs(peak - bins[i].center) <= 1.0) {
                    chosen = i;
                    break;
                }
            }
            ++h.counts[sensor][chosen];
        }
    }
    return h;
}

AggregateStats aggregate_stats(const std::vector<UsageReport>& reports,
                               const DeviceProfile& profile) {
    AggregateStats st;
    st.population = static_cast<int>(reports.size());
    for (Sensor s : kAllSensors) {
        if (profile.has(s)) st.per_sensor_users[s] = 0;
    }
    for (const UsageReport& r : reports) {
        int used = 0;
        for (Sensor s : kAllSensors) {
            auto it = r.sensors.find(s);
            if (it != r.sensors.end() && it->second.any_usage()) {
                ++st.per_sensor_users[s];
                ++used;
            }
        }
        if (used > 0) ++st.any_sensor_users;
        if (used == 3) ++st.all_three_users;
    }
    st.fg_bg = fg_bg_breakdown(reports);
    st.histogram = rate_histogram(reports, profile);
    return st;
}

std::vector<CaseScenario> case_signature_scenarios() {
    const DeviceProfile* p = find_builtin("OnePlus Nord N200");
    if (!p) throw InvariantError("builtin profile table is missing the default device");
    return case_signature_scenarios(*p);
}

std::vector<CaseScenario> case_signature_scenarios(const DeviceProfile& profile) {
    std::vector<CaseScenario> out;

    {
        // Short burst on every sensor the instant the app opens.
        SimApp app;
        app.id = "sdk_burst";
        for (Sensor s : kAllSensors) {
            if (!profile.has(s)) continue;
            app.registrations.push_back(
                {s, RateRequest::named(DelayConstant::Fastest, false), 0.0, 0.5});
        }
        CaseScenario c;
        c.scenario = standard_procedure_scenario(app, profile, 1001);
        c.scenario.name = "sdk_burst";
        c.description = "half-second burst on all three sensors right after launch";
        for (Sensor s : kAllSensors) {
            if (!profile.has(s)) continue;
            CaseExpectation e;
            e.sensor = s;
            e.interval_count = 1;
            e.each_duration_s = 0.5;
            e.duration_tol_s = 0.05;
            c.expectations.push_back(e);
        }
        out.push_back(std::move(c));
    }
    {
        // Continuous moderate-rate accelerometer stream for the whole session.
        SimApp app;
        app.id = "steady_20hz";
        app.registrations.push_back(
            {Sensor::Accelerometer, RateRequest::custom(20.0), 0.0, 30.0});
        CaseScenario c;
        c.scenario = standard_procedure_scenario(app, profile, 1002);
        c.scenario.name = "steady_20hz";
        c.description = "continuous ~20 Hz accelerometer stream, foreground and background";
        CaseExpectation e;
        e.sensor = Sensor::Accelerometer;
        e.interval_count = 1;
        e.each_duration_s = 30.0;
        e.duration_tol_s = 0.5;
        e.constants_in_order = {std::nullopt};  // must classify as a custom rate
        e.custom_rate_hz = 20.0;
        c.expectations.push_back(e);
        out.push_back(std::move(c));
    }
    {
        // An ad page samples at UI rate, then the host app continues at GAME.
        Scenario s = make_scenario(profile, 30.0, 1003);
        s.name = "shake_ad";
        SimApp page;
        page.id = "ad_page";
        page.lifecycle = {{5.0, AppState::Foreground}, {11.0, AppState::Terminated}};
        page.registrations = {
            {Sensor::Accelerometer, RateRequest::named(DelayConstant::Ui), 5.0, 10.0},
            {Sensor::Gyroscope, RateRequest::named(DelayConstant::Ui), 5.0, 10.0}};
        // The pause before the host takes over must span several periods of the
        // slowest monitor stream (gyro floor is 1 Hz here), or the below-threshold
        // dip is too short to survive outlier cleaning and the intervals fuse.
        SimApp host;
        host.id = "host_app";
        host.lifecycle = {{11.0, AppState::Foreground}};
        host.registrations = {
            {Sensor::Accelerometer, RateRequest::named(DelayConstant::Game), 15.0, 28.0},
            {Sensor::Gyroscope, RateRequest::named(DelayConstant::Game), 15.0, 28.0}};
        s.apps = {page, host};
        CaseScenario c;
        c.scenario = std::move(s);
        c.description = "UI-rate sampling handing over to sustained GAME-rate sampling";
        for (Sensor sensor : {Sensor::Accelerometer, Sensor::Gyroscope}) {
            CaseExpectation e;
            e.sensor = sensor;
            e.interval_count = 2;
            e.constants_in_order = {DelayConstant::Ui, DelayConstant::Game};
            c.expectations.push_back(e);
        }
        out.push_back(std::move(c));
    }
    {
        // Listener that outlives its app's termination.
        SimApp app;
        app.id = "sticky_listener";
        app.persists_after_termination = true;
        app.registrations.push_back(
            {Sensor::Accelerometer, RateRequest::named(DelayConstant::Game), 0.0, 31.0});
        CaseScenario c;
        c.scenario = standard_procedure_scenario(app, profile, 1004);
        c.scenario.name = "sticky_listener";
        c.description = "registration that keeps delivering after the app is killed";
        CaseExpectation e;
        e.sensor = Sensor::Accelerometer;
        e.interval_count = 1;
        e.constants_in_order = {DelayConstant::Game};
        e.last_end_after_s = kBaselineSeconds + kForegroundSeconds + kBackgroundSeconds;
        c.expectations.push_back(e);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::string> check_case(const CaseScenario& c, const UsageReport& report) {
    std::vector<std::string> failures;
    for (const CaseExpectation& exp : c.expectations) {
        const std::string prefix =
            c.scenario.name + "/" + std::string(to_string(exp.sensor)) + ": ";
        auto it = report.sensors.find(exp.sensor);
        if (it == report.sensors.end()) {
            failures.push_back(prefix + "no finding for sensor");
            continue;
        }
        const std::vector<UsageInterval>& ivs = it->second.intervals;
        if (exp.interval_count >= 0) {
            if (static_cast<int>(ivs.size()) != exp.interval_count) {
                failures.push_back(prefix + "expected " +
                                   std::to_string(exp.interval_count) + " intervals, got " +
                                   std::to_string(ivs.size()));
                continue;
            }
        } else if (ivs.empty()) {
            failures.push_back(prefix + "expected at least one interval");
            continue;
        }
        if (exp.each_duration_s) {
            for (const UsageInterval& iv : ivs) {
                if (std::fabs(iv.duration_s() - *exp.each_duration_s) > exp.duration_tol_s) {
                    failures.push_back(prefix + "interval duration " +
                                       std::to_string(iv.duration_s()) + " s outside " +
                                       std::to_string(*exp.each_duration_s) + " +/- " +
                                       std::to_string(exp.duration_tol_s));
                }
            }
        }
        if (!exp.constants_in_order.empty()) {
            if (exp.constants_in_order.size() != ivs.size()) {
                failures.push_back(prefix + "expected " +
                                   std::to_string(exp.constants_in_order.size()) +
                                   " classified intervals, got " + std::to_string(ivs.size()));
            } else {
                for (size_t i = 0; i < ivs.size(); ++i) {
                    const auto& want = exp.constants_in_order[i];
                    const auto& got = ivs[i].classified.constant;
                    if (want != got) {
                        const std::string want_s =
                            want ? std::string(to_string(*want)) : "custom";
                        const std::string got_s =
                            got ? std::string(to_string(*got)) : "custom";
                        failures.push_back(prefix + "interval " + std::to_string(i) +
                                           " classified " + got_s + ", expected " + want_s);
                    }
                }
            }
        }
        if (exp.custom_rate_hz) {
            for (const UsageInterval& iv : ivs) {
                if (std::fabs(iv.estimated_rate - *exp.custom_rate_hz) > exp.rate_tol_hz) {
                    failures.push_back(prefix + "estimated rate " +
                                       std::to_string(iv.estimated_rate) + " Hz outside " +
                                       std::to_string(*exp.custom_rate_hz) + " +/- " +
                                       std::to_string(exp.rate_tol_hz));
                }
            }
        }
        if (exp.last_end_after_s && !ivs.empty()) {
            if (ivs.back().end_ns <= seconds_to_ns(*exp.last_end_after_s)) {
                failures.push_back(prefix + "usage ends at " +
                                   std::to_string(ns_to_seconds(ivs.back().end_ns)) +
                                   " s, expected it to outlive " +
                                   std::to_string(*exp.last_end_after_s) + " s");
            }
        }
    }
    return failures;
}

std::vector<SimApp> game_rate_population(int count) {
    std::vector<SimApp> apps;
    for (int i = 0; i < count; ++i) {
        SimApp app;
        app.id = "app_" + std::to_string(i);
        const Sensor primary = kAllSensors[static_cast<size_t>(i) % kAllSensors.size()];
        const bool fastest = i % 2 == 1;
        RateRequest req = fastest
                              ? RateRequest::named(DelayConstant::Fastest, i % 4 == 1)
                              : RateRequest::named(DelayConstant::Game);
        app.registrations.push_back({primary, req, 0.0, 30.0});
        if (i % 5 == 0) {
            const Sensor secondary = kAllSensors[(static_cast<size_t>(i) + 1) % 3];
            app.registrations.push_back(
                {secondary, RateRequest::named(DelayConstant::Game), 2.0, 12.0});
        }
        apps.push_back(std::move(app));
    }
    return apps;
}

std::vector<SimApp> mixed_lifecycle_population(int count, int background_count) {
    if (background_count > count) {
        throw InputError("population: background_count exceeds count");
    }
    std::vector<SimApp> apps;
    for (int i = 0; i < count; ++i) {
        SimApp app;
        app.id = "pop_" + std::to_string(i);
        // Background apps hold the listener through the background window;
        // the rest release it when the foreground phase ends.
        const double hold_s = i < background_count
                                  ? kForegroundSeconds + kBackgroundSeconds
                                  : kForegroundSeconds;
        app.registrations.push_back({Sensor::Accelerometer,
                                     RateRequest::named(DelayConstant::Game), 0.0, hold_s});
        apps.push_back(std::move(app));
    }
    return apps;
}

}  // namespace ratewatch
