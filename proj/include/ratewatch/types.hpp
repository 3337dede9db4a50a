#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ratewatch {

using Hz = double;

// Bad user input (malformed files, unknown names, invalid parameters).
// The CLI maps this to exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal contract (caller bug or corrupted state).
// The CLI maps this to exit code 2.
struct InvariantError : std::logic_error {
    explicit InvariantError(const std::string& msg) : std::logic_error(msg) {}
};

enum class Sensor : int {
    Accelerometer = 0,
    Gyroscope = 1,
    Magnetometer = 2,
};

inline constexpr std::array<Sensor, 3> kAllSensors = {
    Sensor::Accelerometer, Sensor::Gyroscope, Sensor::Magnetometer};

std::string_view to_string(Sensor s);
std::optional<Sensor> sensor_from_string(std::string_view name);

// Where in an app's lifecycle a usage interval falls. Unknown is used when
// no lifecycle timeline is available to the detector.
enum class UsagePhase : int {
    Baseline = 0,
    Foreground = 1,
    Background = 2,
    PostTermination = 3,
    Unknown = 4,
};

std::string_view to_string(UsagePhase p);
std::optional<UsagePhase> phase_from_string(std::string_view name);

constexpr int64_t kNsPerSecond = 1'000'000'000;

int64_t seconds_to_ns(double seconds);
double ns_to_seconds(int64_t ns);

// Round to 3 fractional digits; used when serializing Hz and seconds.
double round3(double v);

}  // namespace ratewatch
