#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratewatch/types.hpp"

namespace ratewatch {

// The four framework-named delivery rates an app can request by constant
// instead of by value.
enum class DelayConstant : int {
    Normal = 0,
    Ui = 1,
    Game = 2,
    Fastest = 3,
};

std::string_view to_string(DelayConstant c);
std::optional<DelayConstant> delay_constant_from_string(std::string_view name);

// A listener's requested sampling rate: either one of the named constants or
// an explicit rate in Hz. high_rate_permission models the install-time
// permission that lifts the high-rate cap on Android 12+.
struct RateRequest {
    std::optional<DelayConstant> constant;
    Hz custom_hz = 0.0;
    bool high_rate_permission = false;

    static RateRequest named(DelayConstant c, bool permission = false);
    static RateRequest custom(Hz hz, bool permission = false);

    bool is_named() const { return constant.has_value(); }
};

// Per-sensor capabilities of one device model.
struct SensorCaps {
    Hz f_min = 0.0;                       // slowest rate the OS ever delivers
    std::vector<Hz> supported_rates;      // ascending, first == f_min
    std::optional<Hz> cap_unpermitted;    // rate ceiling without the high-rate permission
    std::map<DelayConstant, Hz> constant_map;

    Hz f_max() const { return supported_rates.back(); }
};

class DeviceProfile {
  public:
    // Placeholder with no sensors; any caps() access throws. Assign a real
    // profile before use.
    DeviceProfile() = default;

    DeviceProfile(std::string name, int android_version,
                  std::map<Sensor, SensorCaps> sensors);

    const std::string& name() const { return name_; }
    int android_version() const { return android_version_; }

    bool has(Sensor s) const { return sensors_.count(s) != 0; }
    const SensorCaps& caps(Sensor s) const;
    const std::map<Sensor, SensorCaps>& sensors() const { return sensors_; }

  private:
    std::string name_;
    int android_version_ = 0;
    std::map<Sensor, SensorCaps> sensors_;
};

// Per-sensor decision boundary for the detector: f_min + 0.5 Hz, chosen so
// the monitor's own f_min stream sits below it and any faster delivery,
// jittered by up to ~0.4 Hz, sits above it.
struct DetectionThreshold {
    std::map<Sensor, Hz> threshold_hz;

    bool has(Sensor s) const { return threshold_hz.count(s) != 0; }
    Hz at(Sensor s) const;
};

inline constexpr Hz kThresholdMarginHz = 0.5;

DetectionThreshold thresholds_for(const DeviceProfile& profile);

// The delivery rate the OS grants a single request on this device: named
// constants go through the constant map, custom values snap up to the next
// supported rate, and the high-rate cap applies when the permission is absent.
Hz resolve_request(const DeviceProfile& profile, Sensor sensor,
                   const RateRequest& request);

// An observed rate mapped back to the request that plausibly produced it.
struct RateClass {
    std::optional<DelayConstant> constant;  // set when within 1 Hz of a named rate
    Hz nearest_hz = 0.0;                    // the named rate, or the observed value
};

RateClass classify_rate(const DeviceProfile& profile, Sensor sensor, Hz observed);

// Builds a full capability table from the minimum rates alone. Supported
// rates are the common Android delivery steps clipped to [f_min, f_max];
// named constants snap up to supported values; Android 12+ caps the
// non-magnetometer sensors at 206 Hz without the high-rate permission.
DeviceProfile synthesize_profile(std::string name, int android_version,
                                 const std::map<Sensor, Hz>& f_min);

// Reference profiles for the handsets the detector was tuned on.
const std::vector<DeviceProfile>& builtin_profiles();

// Case/punctuation-insensitive lookup; nullptr when unknown.
const DeviceProfile* find_builtin(std::string_view name);

// Text form: a `device =` / `android_version =` preamble and one
// `[sensor]` section per profiled sensor. See docs/formats.md.
DeviceProfile parse_profile(std::istream& in);
DeviceProfile load_profile_file(const std::string& path);
std::string write_profile(const DeviceProfile& profile);

// Resolves --profile style arguments: builtin name first, then file path.
DeviceProfile resolve_profile_arg(const std::string& name_or_path);

}  // namespace ratewatch
