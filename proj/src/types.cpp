#include "ratewatch/types.hpp"

#include <cmath>

namespace ratewatch {

std::string_view to_string(Sensor s) {
    switch (s) {
        case Sensor::Accelerometer: return "accelerometer";
        case Sensor::Gyroscope: return "gyroscope";
        case Sensor::Magnetometer: return "magnetometer";
    }
    throw InvariantError("unhandled sensor kind");
}

std::optional<Sensor> sensor_from_string(std::string_view name) {
    if (name == "accelerometer") return Sensor::Accelerometer;
    if (name == "gyroscope") return Sensor::Gyroscope;
    if (name == "magnetometer") return Sensor::Magnetometer;
    return std::nullopt;
}

std::string_view to_string(UsagePhase p) {
    switch (p) {
        case UsagePhase::Baseline: return "baseline";
        case UsagePhase::Foreground: return "foreground";
        case UsagePhase::Background: return "background";
        case UsagePhase::PostTermination: return "post_termination";
        case UsagePhase::Unknown: return "unknown";
    }
    throw InvariantError("unhandled usage phase");
}

std::optional<UsagePhase> phase_from_string(std::string_view name) {
    if (name == "baseline") return UsagePhase::Baseline;
    if (name == "foreground") return UsagePhase::Foreground;
    if (name == "background") return UsagePhase::Background;
    if (name == "post_termination") return UsagePhase::PostTermination;
    if (name == "unknown") return UsagePhase::Unknown;
    return std::nullopt;
}

int64_t seconds_to_ns(double seconds) {
    const double ns = seconds * 1e9;
    constexpr double kLimit = 9.0e18;  // keep llround away from overflow
    if (ns >= kLimit) return static_cast<int64_t>(kLimit);
    if (ns <= -kLimit) return static_cast<int64_t>(-kLimit);
    return static_cast<int64_t>(std::llround(ns));
}

double ns_to_seconds(int64_t ns) {
    return static_cast<double>(ns) / 1e9;
}

double round3(double v) {
    return std::round(v * 1000.0) / 1000.0;
}

}  // namespace ratewatch
