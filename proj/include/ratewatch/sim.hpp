#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratewatch/detector.hpp"
#include "ratewatch/device_model.hpp"
#include "ratewatch/types.hpp"

namespace ratewatch {

enum class AppState : int {
    Foreground = 0,
    Background = 1,
    Terminated = 2,
};

std::string_view to_string(AppState s);
std::optional<AppState> app_state_from_string(std::string_view name);

// One listener registration held by an app. Times are absolute scenario
// seconds; the effective window is clipped to the app's lifetime.
struct SensorRegistration {
    Sensor sensor = Sensor::Accelerometer;
    RateRequest request;
    double register_s = 0.0;
    double unregister_s = 0.0;  // > register_s
};

struct LifecycleEvent {
    double time_s = 0.0;
    AppState state = AppState::Foreground;
};

struct SimApp {
    std::string id;
    std::vector<SensorRegistration> registrations;
    // Strictly increasing times. An empty lifecycle means foreground from 0.
    std::vector<LifecycleEvent> lifecycle;
    // When set, listeners keep delivering after the Terminated event
    // (a service or leaked binder holding the registration alive).
    bool persists_after_termination = false;

    void validate() const;
    double launch_s() const;  // first lifecycle time; 0 when lifecycle is empty
    // Termination time, or +inf when the app is never terminated.
    double termination_s() const;
    AppState state_at(double t_s) const;
};

// Event-timing noise: each period's rate is drawn uniformly from
// [rate - half_width_hz, rate + half_width_hz]. Transitions between delivery
// rates emit outlier_run_min..outlier_run_max samples near the midpoint of
// the two rates before the new rate locks in.
struct NoiseModel {
    double half_width_hz = 0.2;  // in [0, 0.25); keeps jitter inside one rate step
    int outlier_run_min = 1;
    int outlier_run_max = 2;

    void validate() const;
};

struct PhaseWindow {
    int64_t start_ns = 0;
    int64_t end_ns = 0;
    UsagePhase phase = UsagePhase::Unknown;
};

using PhaseTimeline = std::vector<PhaseWindow>;

struct Scenario {
    std::string name;
    DeviceProfile profile;
    // The observer's own registrations; defaults to f_min on every sensor the
    // profile covers (see make_scenario).
    std::map<Sensor, RateRequest> monitor_request;
    std::vector<SimApp> apps;
    double duration_s = 0.0;
    NoiseModel noise;
    uint64_t seed = 0;
    std::optional<PhaseTimeline> phases;

    void validate() const;
};

// Scenario with the monitor installed at f_min per sensor and no apps yet.
Scenario make_scenario(const DeviceProfile& profile, double duration_s,
                       uint64_t seed);

// What the device actually delivered while at least one app was registered.
struct GroundTruthInterval {
    int64_t start_ns = 0;
    int64_t end_ns = 0;
    Hz rate_hz = 0.0;                   // delivered rate (already arbitrated)
    std::vector<std::string> app_ids;   // apps registered during the interval
    UsagePhase state = UsagePhase::Unknown;  // lifecycle state of the rate-setting app
};

struct GroundTruthLog {
    std::string scenario;
    std::string device;
    double duration_s = 0.0;
    uint64_t seed = 0;
    std::map<Sensor, std::vector<GroundTruthInterval>> intervals;
    std::optional<PhaseTimeline> phases;
};

struct SimulationResult {
    std::map<Sensor, SensorEventTrace> traces;
    GroundTruthLog truth;
};

// The rate every listener of `sensor` receives when the given rates have
// been granted: the maximum, because delivery is shared across listeners.
Hz arbitrate(const DeviceProfile& profile, Sensor sensor,
             std::span<const Hz> granted);

// Discrete-event generation of the monitor-visible timestamp stream plus the
// ground-truth rate intervals. Deterministic per (scenario, seed).
SimulationResult simulate(const Scenario& scenario);

// Standard observation procedure: 5 s baseline with only the monitor, 15 s
// with the app in the foreground, 15 s in the background, then termination
// with a 2 s tail. The template app's registration times are relative to its
// launch and get shifted to the foreground start; its lifecycle is replaced.
Scenario standard_procedure_scenario(const SimApp& app_template,
                                     const DeviceProfile& profile,
                                     uint64_t seed = 0);

inline constexpr double kBaselineSeconds = 5.0;
inline constexpr double kForegroundSeconds = 15.0;
inline constexpr double kBackgroundSeconds = 15.0;
inline constexpr double kTailSeconds = 2.0;

PhaseTimeline standard_phase_timeline();

}  // namespace ratewatch
