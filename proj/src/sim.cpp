#include "ratewatch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace ratewatch {
namespace {

// Independent deterministic stream per (seed, index).
uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

int64_t period_ns(double rate_hz) {
    return std::max<int64_t>(1, static_cast<int64_t>(std::llround(1e9 / rate_hz)));
}

UsagePhase phase_of(AppState s) {
    switch (s) {
        case AppState::Foreground: return UsagePhase::Foreground;
        case AppState::Background: return UsagePhase::Background;
        case AppState::Terminated: return UsagePhase::PostTermination;
    }
    throw InvariantError("unhandled app state");
}

}  // namespace

std::string_view to_string(AppState s) {
    switch (s) {
        case AppState::Foreground: return "foreground";
        case AppState::Background: return "background";
        case AppState::Terminated: return "terminated";
    }
    throw InvariantError("unhandled app state");
}

std::optional<AppState> app_state_from_string(std::string_view name) {
    if (name == "foreground") return AppState::Foreground;
    if (name == "background") return AppState::Background;
    if (name == "terminated") return AppState::Terminated;
    return std::nullopt;
}

void SimApp::validate() const {
    if (id.empty()) throw InputError("app: id must not be empty");
    for (size_t i = 0; i + 1 < lifecycle.size(); ++i) {
        if (lifecycle[i].time_s >= lifecycle[i + 1].time_s) {
            throw InputError("app '" + id + "': lifecycle times must be strictly increasing");
        }
    }
    for (const SensorRegistration& reg : registrations) {
        if (reg.register_s < 0.0) {
            throw InputError("app '" + id + "': registration time must be >= 0");
        }
        if (reg.unregister_s <= reg.register_s) {
            throw InputError("app '" + id + "': unregister must come after register");
        }
    }
}

double SimApp::launch_s() const {
    return lifecycle.empty() ? 0.0 : lifecycle.front().time_s;
}

double SimApp::termination_s() const {
    for (const LifecycleEvent& e : lifecycle) {
        if (e.state == AppState::Terminated) return e.time_s;
    }
    return std::numeric_limits<double>::infinity();
}

AppState SimApp::state_at(double t_s) const {
    AppState state = AppState::Foreground;  // empty lifecycle: foreground from 0
    for (const LifecycleEvent& e : lifecycle) {
        if (e.time_s > t_s) break;
        state = e.state;
    }
    return state;
}

void NoiseModel::validate() const {
    if (half_width_hz < 0.0 || half_width_hz >= 0.25) {
        throw InputError("noise: half_width_hz must lie in [0, 0.25)");
    }
    if (outlier_run_min < 1 || outlier_run_max < outlier_run_min || outlier_run_max > 4) {
        throw InputError("noise: outlier run bounds must satisfy 1 <= min <= max <= 4");
    }
}

void Scenario::validate() const {
    if (profile.sensors().empty()) {
        throw InputError("scenario: no device profile set");
    }
    if (duration_s <= 0.0) throw InputError("scenario: duration must be positive");
    noise.validate();
    std::set<std::string> ids;
    for (const SimApp& app : apps) {
        app.validate();
        if (!ids.insert(app.id).second) {
            throw InputError("scenario: duplicate app id '" + app.id + "'");
        }
        for (const SensorRegistration& reg : app.registrations) {
            if (!profile.has(reg.sensor)) {
                throw InputError("app '" + app.id + "' registers " +
                                 std::string(to_string(reg.sensor)) +
                                 " which profile '" + profile.name() + "' lacks");
            }
        }
    }
    for (const auto& [sensor, req] : monitor_request) {
        if (!profile.has(sensor)) {
            throw InputError("monitor registers " + std::string(to_string(sensor)) +
                             " which profile '" + profile.name() + "' lacks");
        }
        (void)req;
    }
}

Scenario make_scenario(const DeviceProfile& profile, double duration_s, uint64_t seed) {
    Scenario s;
    s.profile = profile;
    s.duration_s = duration_s;
    s.seed = seed;
    for (const auto& [sensor, caps] : profile.sensors()) {
        s.monitor_request[sensor] = RateRequest::custom(caps.f_min);
    }
    return s;
}

Hz arbitrate(const DeviceProfile& profile, Sensor sensor, std::span<const Hz> granted) {
    (void)profile.caps(sensor);  // sensor must exist on the device
    Hz delivered = 0.0;
    for (Hz g : granted) {
        if (g <= 0.0) throw InvariantError("arbitrate: granted rates must be positive");
        delivered = std::max(delivered, g);
    }
    return delivered;  // all listeners share the fastest granted stream
}

namespace {

struct Activation {
    int64_t start_ns;
    int64_t end_ns;
    Hz granted;
    int app_index;
};

struct Segment {
    int64_t start_ns;
    int64_t end_ns;
    Hz rate;
    std::vector<int> app_indices;
    int setter = -1;  // app whose grant set the delivered rate; -1 = monitor alone
};

// Splits [0, duration) at every registration or lifecycle edge and computes
// the delivered rate per piece.
std::vector<Segment> build_segments(const Scenario& scenario,
                                    std::optional<Hz> monitor_rate,
                                    const std::vector<Activation>& acts) {
    const int64_t duration_ns = seconds_to_ns(scenario.duration_s);
    std::set<int64_t> cuts = {0, duration_ns};
    for (const Activation& a : acts) {
        cuts.insert(a.start_ns);
        cuts.insert(a.end_ns);
    }
    for (const SimApp& app : scenario.apps) {
        for (const LifecycleEvent& e : app.lifecycle) {
            int64_t t = seconds_to_ns(e.time_s);
            if (t > 0 && t < duration_ns) cuts.insert(t);
        }
    }
    std::vector<int64_t> edges(cuts.begin(), cuts.end());
    std::vector<Segment> segs;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        Segment seg;
        seg.start_ns = edges[i];
        seg.end_ns = edges[i + 1];
        Hz best = monitor_rate.value_or(0.0);
        for (const Activation& a : acts) {
            if (a.start_ns <= seg.start_ns && seg.start_ns < a.end_ns) {
                seg.app_indices.push_back(a.app_index);
                if (a.granted > best) {
                    best = a.granted;
                    seg.setter = a.app_index;
                }
            }
        }
        seg.rate = best;
        segs.push_back(std::move(seg));
    }
    return segs;
}

std::vector<Activation> collect_activations(const Scenario& scenario, Sensor sensor) {
    const int64_t duration_ns = seconds_to_ns(scenario.duration_s);
    std::vector<Activation> acts;
    for (size_t ai = 0; ai < scenario.apps.size(); ++ai) {
        const SimApp& app = scenario.apps[ai];
        for (const SensorRegistration& reg : app.registrations) {
            if (reg.sensor != sensor) continue;
            double start = std::max(reg.register_s, app.launch_s());
            double end = reg.unregister_s;
            if (!app.persists_after_termination) {
                end = std::min(end, app.termination_s());
            }
            int64_t s_ns = std::max<int64_t>(0, seconds_to_ns(start));
            int64_t e_ns = std::min(duration_ns, seconds_to_ns(end));
            if (s_ns >= e_ns) continue;
            acts.push_back({s_ns, e_ns,
                            resolve_request(scenario.profile, sensor, reg.request),
                            static_cast<int>(ai)});
        }
    }
    return acts;
}

}  // namespace

SimulationResult simulate(const Scenario& scenario) {
    scenario.validate();
    SimulationResult result;
    result.truth.scenario = scenario.name;
    result.truth.device = scenario.profile.name();
    result.truth.duration_s = scenario.duration_s;
    result.truth.seed = scenario.seed;
    result.truth.phases = scenario.phases;

    for (Sensor sensor : kAllSensors) {
        const bool monitored = scenario.monitor_request.count(sensor) != 0;
        std::vector<Activation> acts = collect_activations(scenario, sensor);
        if (!monitored && acts.empty()) continue;

        std::optional<Hz> monitor_rate;
        if (monitored) {
            monitor_rate = resolve_request(scenario.profile, sensor,
                                           scenario.monitor_request.at(sensor));
        }
        std::vector<Segment> segs = build_segments(scenario, monitor_rate, acts);

        // Ground truth: spans with at least one registered app, annotated with
        // the lifecycle state of the rate-setting app (ties go to the monitor,
        // whose grant never exceeds an app's).
        std::vector<GroundTruthInterval>& truth = result.truth.intervals[sensor];
        for (const Segment& seg : segs) {
            if (seg.app_indices.empty()) continue;
            GroundTruthInterval gt;
            gt.start_ns = seg.start_ns;
            gt.end_ns = seg.end_ns;
            gt.rate_hz = seg.rate;
            for (int ai : seg.app_indices) gt.app_ids.push_back(scenario.apps[ai].id);
            std::sort(gt.app_ids.begin(), gt.app_ids.end());
            const int ref = seg.setter >= 0 ? seg.setter : seg.app_indices.front();
            gt.state = phase_of(
                scenario.apps[ref].state_at(ns_to_seconds(seg.start_ns)));
            if (!truth.empty()) {
                GroundTruthInterval& last = truth.back();
                if (last.end_ns == gt.start_ns && last.rate_hz == gt.rate_hz &&
                    last.app_ids == gt.app_ids && last.state == gt.state) {
                    last.end_ns = gt.end_ns;
                    continue;
                }
            }
            truth.push_back(std::move(gt));
        }
        if (truth.empty()) result.truth.intervals.erase(sensor);

        if (!monitored) continue;

        // Monitor-visible delivery timeline: adjacent equal-rate segments
        // behave as one, so merge before generating events.
        std::vector<Segment> timeline;
        for (const Segment& seg : segs) {
            if (!timeline.empty() && timeline.back().rate == seg.rate) {
                timeline.back().end_ns = seg.end_ns;
            } else {
                timeline.push_back(seg);
            }
        }

        std::mt19937_64 eng(mix_seed(scenario.seed, static_cast<uint64_t>(sensor)));
        const NoiseModel& noise = scenario.noise;
        auto jittered_period = [&](double rate) {
            return period_ns(rate + uniform_in(eng, -noise.half_width_hz,
                                               noise.half_width_hz));
        };

        SensorEventTrace trace;
        trace.sensor = sensor;
        trace.timestamps_ns.push_back(0);
        int64_t t_last = 0;
        for (size_t k = 0; k < timeline.size(); ++k) {
            const double rate = timeline[k].rate;
            if (k > 0) {
                // A rate switch re-anchors delivery at the boundary; the first
                // couple of periods come out near the midpoint of old and new
                // rate while the switch settles.
                const int span = noise.outlier_run_max - noise.outlier_run_min + 1;
                const int runs = noise.outlier_run_min +
                                 static_cast<int>(eng() % static_cast<uint64_t>(span));
                const double mid = (timeline[k - 1].rate + rate) / 2.0;
                int64_t anchor = std::max(timeline[k].start_ns, t_last);
                for (int i = 0; i < runs; ++i) {
                    anchor += jittered_period(mid);
                    if (anchor >= timeline[k].end_ns) break;
                    trace.timestamps_ns.push_back(anchor);
                    t_last = anchor;
                }
            }
            while (true) {
                const int64_t tn = t_last + jittered_period(rate);
                if (tn >= timeline[k].end_ns) break;
                trace.timestamps_ns.push_back(tn);
                t_last = tn;
            }
        }
        result.traces[sensor] = std::move(trace);
    }
    return result;
}

PhaseTimeline standard_phase_timeline() {
    const int64_t t0 = 0;
    const int64_t t1 = seconds_to_ns(kBaselineSeconds);
    const int64_t t2 = seconds_to_ns(kBaselineSeconds + kForegroundSeconds);
    const int64_t t3 = seconds_to_ns(kBaselineSeconds + kForegroundSeconds +
                                     kBackgroundSeconds);
    const int64_t t4 = seconds_to_ns(kBaselineSeconds + kForegroundSeconds +
                                     kBackgroundSeconds + kTailSeconds);
    return {{t0, t1, UsagePhase::Baseline},
            {t1, t2, UsagePhase::Foreground},
            {t2, t3, UsagePhase::Background},
            {t3, t4, UsagePhase::PostTermination}};
}

Scenario standard_procedure_scenario(const SimApp& app_template,
                                     const DeviceProfile& profile, uint64_t seed) {
    const double fg_start = kBaselineSeconds;
    const double bg_start = kBaselineSeconds + kForegroundSeconds;
    const double term = bg_start + kBackgroundSeconds;
    Scenario s = make_scenario(profile, term + kTailSeconds, seed);
    s.name = "standard:" + app_template.id;
    s.phases = standard_phase_timeline();

    SimApp app = app_template;
    app.lifecycle = {{fg_start, AppState::Foreground},
                     {bg_start, AppState::Background},
                     {term, AppState::Terminated}};
    for (SensorRegistration& reg : app.registrations) {
        reg.register_s += fg_start;
        reg.unregister_s += fg_start;
    }
    s.apps.push_back(std::move(app));
    return s;
}

}  // namespace ratewatch
