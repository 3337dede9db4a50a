#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ratewatch/device_model.hpp"
#include "ratewatch/types.hpp"

namespace ratewatch {

// Timestamped delivery of one sensor's events to the monitor listener.
// Timestamps are nanoseconds from scenario start, strictly increasing.
struct SensorEventTrace {
    Sensor sensor = Sensor::Accelerometer;
    std::vector<int64_t> timestamps_ns;
};

struct RatePoint {
    int64_t t_ns = 0;  // timestamp of the later event of the pair
    Hz rate = 0.0;
};

struct RateSeries {
    Sensor sensor = Sensor::Accelerometer;
    std::vector<RatePoint> points;
    bool cleaned = false;
    // Too little data to clean or detect on (fewer than 2 events, or fewer
    // than 3 rate samples at cleaning time). Degenerate series pass through
    // unchanged and yield no intervals.
    bool degenerate = false;
};

// Per-pair instantaneous rate: 1e9 / (t[i+1] - t[i]).
RateSeries instant_rates(const SensorEventTrace& trace);

// Removes rate transition artifacts: after quantizing to `bucket_hz` wide
// value buckets, any interior run of fewer than 3 consecutive equal-bucket
// samples takes the value of whichever neighboring run is closer in
// magnitude (ties prefer the preceding run). Runs touching either end of the
// series are kept. Idempotent; never introduces values absent from the input.
RateSeries clean_outliers(const RateSeries& series, double bucket_hz = 0.1);

struct UsageInterval {
    Sensor sensor = Sensor::Accelerometer;
    int64_t start_ns = 0;
    int64_t end_ns = 0;           // > start_ns
    Hz estimated_rate = 0.0;      // max cleaned rate inside the interval
    RateClass classified;
    UsagePhase phase = UsagePhase::Unknown;

    double duration_s() const { return ns_to_seconds(end_ns - start_ns); }
};

struct DetectorConfig {
    int min_duration_ms = 100;   // shorter stretches are discarded
    int merge_gap_ms = 500;      // stretches closer than this merge
    double bucket_hz = 0.1;      // outlier-run quantization width
};

// Maximal stretches of cleaned rate above the threshold, merged across gaps
// shorter than merge_gap_ms and filtered to min_duration_ms. Requires a
// cleaned series; raw input is an InvariantError.
std::vector<UsageInterval> detect_usage(const RateSeries& cleaned,
                                        const DetectionThreshold& threshold,
                                        Sensor sensor,
                                        const DetectorConfig& config = {});

struct SensorFinding {
    Hz threshold_hz = 0.0;
    bool insufficient = false;  // degenerate trace; no statement possible
    std::vector<UsageInterval> intervals;

    bool any_usage() const { return !intervals.empty(); }
};

struct UsageReport {
    std::string device;
    int min_duration_ms = 100;
    std::map<Sensor, SensorFinding> sensors;
    std::vector<std::string> notes;

    bool any_usage() const;
    bool all_three() const;  // usage seen on accel, gyro and magnetometer
};

// Full pipeline over one trace set: rates, cleaning, thresholding,
// classification. Sensors absent from the profile are skipped with a note;
// degenerate traces set `insufficient` without aborting the others.
UsageReport detect_all(const std::map<Sensor, SensorEventTrace>& traces,
                       const DeviceProfile& profile,
                       const DetectorConfig& config = {});

}  // namespace ratewatch
