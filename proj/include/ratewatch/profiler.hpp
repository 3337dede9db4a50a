#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "ratewatch/detector.hpp"
#include "ratewatch/device_model.hpp"
#include "ratewatch/sim.hpp"
#include "ratewatch/types.hpp"

namespace ratewatch {

// Probing schedule for measuring a device's slowest delivered rate. The
// candidates are requested one after another, slowest plausible value last,
// so the full sweep stays within the time budget.
struct ProbePlan {
    std::vector<Hz> candidate_rates = {10.0, 7.0, 5.0, 2.0, 1.0, 0.5};
    double dwell_s = 5.0;

    void validate(size_t sensor_count) const;
};

inline constexpr double kProfilingBudgetSeconds = 120.0;

// Registers a listener at the requested rate and returns the delivered
// event stream for one dwell period.
using ProbeFn = std::function<SensorEventTrace(const RateRequest&, Sensor)>;

struct ProfileMeasurement {
    std::map<Sensor, Hz> f_min;       // per profiled sensor, 0.5 Hz resolution
    std::vector<Sensor> unprofiled;   // probe failed or returned no usable data
    double probing_time_s = 0.0;      // simulated dwell total
};

// Sweeps the candidate rates on each sensor and keeps the slowest delivered
// rate. A probe that throws or returns a degenerate trace marks the sensor
// unprofiled instead of aborting the sweep.
ProfileMeasurement profile_device(const ProbeFn& probe, const ProbePlan& plan,
                                  std::span<const Sensor> sensors);

// f_min + 0.5 per profiled sensor; unprofiled sensors are absent.
DetectionThreshold derive_thresholds(const ProfileMeasurement& measurement);

// Probe backed by the simulator: each call runs an app-free scenario on the
// given device with the monitor registered at the probed rate.
ProbeFn simulated_probe(const DeviceProfile& device, double dwell_s,
                        uint64_t seed, const NoiseModel& noise = {});

// Measured capability table for writing back to a profile file: the source
// profile's identity with f_min replaced by the measurement. Sensors the
// measurement missed are dropped.
DeviceProfile measurement_to_profile(const ProfileMeasurement& measurement,
                                     const std::string& device_name,
                                     int android_version);

}  // namespace ratewatch
