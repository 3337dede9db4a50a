#include "ratewatch/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace ratewatch {

void ProbePlan::validate(size_t sensor_count) const {
    if (candidate_rates.empty()) throw InputError("probe plan: no candidate rates");
    for (size_t i = 0; i < candidate_rates.size(); ++i) {
        if (candidate_rates[i] <= 0.0) {
            throw InputError("probe plan: candidate rates must be positive");
        }
        if (i > 0 && candidate_rates[i] >= candidate_rates[i - 1]) {
            throw InputError("probe plan: candidate rates must be strictly descending");
        }
    }
    if (dwell_s < 2.0) {
        throw InputError("probe plan: dwell must be at least 2 s per candidate");
    }
    const double total =
        dwell_s * static_cast<double>(candidate_rates.size()) *
        static_cast<double>(sensor_count);
    if (total > kProfilingBudgetSeconds) {
        throw InputError("probe plan: sweep needs " + std::to_string(total) +
                         " s, over the " + std::to_string(kProfilingBudgetSeconds) +
                         " s budget");
    }
}

namespace {

// Delivered rate of one dwell: median of the cleaned instantaneous rates,
// on a 0.5 Hz grid (the resolution the candidate ladder probes at).
std::optional<Hz> measure_trace(const SensorEventTrace& trace) {
    RateSeries rates = instant_rates(trace);
    RateSeries cleaned = clean_outliers(rates);
    if (cleaned.degenerate) return std::nullopt;
    std::vector<double> values;
    values.reserve(cleaned.points.size());
    for (const RatePoint& p : cleaned.points) values.push_back(p.rate);
    std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
    const double median = values[values.size() / 2];
    return std::round(median * 2.0) / 2.0;
}

}  // namespace

ProfileMeasurement profile_device(const ProbeFn& probe, const ProbePlan& plan,
                                  std::span<const Sensor> sensors) {
    plan.validate(sensors.size());
    ProfileMeasurement m;
    for (Sensor sensor : sensors) {
        std::optional<Hz> slowest;
        bool failed = false;
        for (Hz candidate : plan.candidate_rates) {
            std::optional<Hz> delivered;
            try {
                delivered = measure_trace(probe(RateRequest::custom(candidate), sensor));
            } catch (const std::exception&) {
                failed = true;
                break;
            }
            m.probing_time_s += plan.dwell_s;
            if (!delivered) {
                failed = true;
                break;
            }
            if (!slowest || *delivered < *slowest) slowest = *delivered;
        }
        if (failed || !slowest) {
            m.unprofiled.push_back(sensor);
        } else {
            m.f_min[sensor] = *slowest;
        }
    }
    return m;
}

DetectionThreshold derive_thresholds(const ProfileMeasurement& measurement) {
    DetectionThreshold t;
    for (const auto& [sensor, f_min] : measurement.f_min) {
        t.threshold_hz[sensor] = f_min + kThresholdMarginHz;
    }
    return t;
}

ProbeFn simulated_probe(const DeviceProfile& device, double dwell_s, uint64_t seed,
                        const NoiseModel& noise) {
    auto calls = std::make_shared<uint64_t>(0);
    return [device, dwell_s, seed, noise, calls](const RateRequest& request,
                                                 Sensor sensor) {
        Scenario s;
        s.name = "probe";
        s.profile = device;
        s.duration_s = dwell_s;
        s.noise = noise;
        s.seed = seed + (*calls)++;
        s.monitor_request[sensor] = request;
        SimulationResult result = simulate(s);
        auto it = result.traces.find(sensor);
        if (it == result.traces.end()) {
            throw InvariantError("probe produced no trace");
        }
        return it->second;
    };
}

DeviceProfile measurement_to_profile(const ProfileMeasurement& measurement,
                                     const std::string& device_name,
                                     int android_version) {
    if (measurement.f_min.empty()) {
        throw InputError("profiling failed on every sensor; nothing to write");
    }
    return synthesize_profile(device_name, android_version, measurement.f_min);
}

}  // namespace ratewatch
