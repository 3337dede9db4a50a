#include "ratewatch/device_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace ratewatch {
namespace {

constexpr double kRateEps = 1e-9;

// Delivery steps common across the supported handsets; per-sensor tables are
// clipped out of this list. 20 Hz is a plain delivery step (seen from SDKs
// requesting ~50 ms intervals), not a named constant.
constexpr std::array<Hz, 7> kCommonSteps = {5.0, 15.0, 20.0, 52.0, 100.0, 206.0, 416.0};
constexpr Hz kHighRateCap = 206.0;  // measured ceiling without the permission
constexpr int kCapIntroducedVersion = 12;

Hz default_f_max(Sensor s) {
    return s == Sensor::Magnetometer ? 100.0 : 416.0;
}

bool rate_eq(Hz a, Hz b) { return std::fabs(a - b) < kRateEps; }

bool contains_rate(const std::vector<Hz>& rates, Hz v) {
    return std::any_of(rates.begin(), rates.end(),
                       [&](Hz r) { return rate_eq(r, v); });
}

Hz snap_up(const std::vector<Hz>& supported, Hz v) {
    for (Hz r : supported) {
        if (r + kRateEps >= v) return r;
    }
    return supported.back();
}

std::string fmt_hz(Hz v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw InvariantError("rate formatting failed");
    return std::string(buf, ptr);
}

std::string normalize_name(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

void validate_caps(const std::string& device, Sensor sensor, const SensorCaps& caps) {
    auto fail = [&](const std::string& what) {
        throw InputError("profile '" + device + "', " + std::string(to_string(sensor)) +
                         ": " + what);
    };
    if (caps.f_min <= 0.0) fail("f_min must be positive");
    if (caps.supported_rates.empty()) fail("supported_rates must not be empty");
    if (!rate_eq(caps.supported_rates.front(), caps.f_min)) {
        fail("supported_rates must start at f_min");
    }
    for (size_t i = 0; i + 1 < caps.supported_rates.size(); ++i) {
        if (caps.supported_rates[i] + kRateEps >= caps.supported_rates[i + 1]) {
            fail("supported_rates must be strictly ascending");
        }
    }
    for (auto c : {DelayConstant::Normal, DelayConstant::Ui, DelayConstant::Game,
                   DelayConstant::Fastest}) {
        auto it = caps.constant_map.find(c);
        if (it == caps.constant_map.end()) {
            fail("constant map is missing " + std::string(to_string(c)));
        }
        if (!contains_rate(caps.supported_rates, it->second)) {
            fail("constant " + std::string(to_string(c)) + " maps outside supported_rates");
        }
    }
    Hz prev = 0.0;
    for (auto c : {DelayConstant::Normal, DelayConstant::Ui, DelayConstant::Game,
                   DelayConstant::Fastest}) {
        Hz v = caps.constant_map.at(c);
        if (v + kRateEps < prev) fail("constant map must be non-decreasing");
        prev = v;
    }
    if (caps.cap_unpermitted) {
        if (!contains_rate(caps.supported_rates, *caps.cap_unpermitted)) {
            fail("cap_unpermitted must be a supported rate");
        }
    }
}

SensorCaps synthesize_caps(Sensor sensor, Hz f_min, int android_version) {
    if (f_min <= 0.0) {
        throw InputError(std::string(to_string(sensor)) + ": f_min must be positive");
    }
    SensorCaps caps;
    caps.f_min = f_min;
    caps.supported_rates.push_back(f_min);
    const Hz f_max = default_f_max(sensor);
    for (Hz step : kCommonSteps) {
        if (step > f_min + kRateEps && step <= f_max + kRateEps) {
            caps.supported_rates.push_back(step);
        }
    }
    caps.constant_map[DelayConstant::Normal] = snap_up(caps.supported_rates, 5.0);
    caps.constant_map[DelayConstant::Ui] = snap_up(caps.supported_rates, 15.0);
    caps.constant_map[DelayConstant::Game] = snap_up(caps.supported_rates, 52.0);
    caps.constant_map[DelayConstant::Fastest] = caps.supported_rates.back();
    if (android_version >= kCapIntroducedVersion && sensor != Sensor::Magnetometer &&
        contains_rate(caps.supported_rates, kHighRateCap)) {
        caps.cap_unpermitted = kHighRateCap;
    }
    return caps;
}

}  // namespace

std::string_view to_string(DelayConstant c) {
    switch (c) {
        case DelayConstant::Normal: return "normal";
        case DelayConstant::Ui: return "ui";
        case DelayConstant::Game: return "game";
        case DelayConstant::Fastest: return "fastest";
    }
    throw InvariantError("unhandled delay constant");
}

std::optional<DelayConstant> delay_constant_from_string(std::string_view name) {
    if (name == "normal") return DelayConstant::Normal;
    if (name == "ui") return DelayConstant::Ui;
    if (name == "game") return DelayConstant::Game;
    if (name == "fastest") return DelayConstant::Fastest;
    return std::nullopt;
}

RateRequest RateRequest::named(DelayConstant c, bool permission) {
    RateRequest r;
    r.constant = c;
    r.high_rate_permission = permission;
    return r;
}

RateRequest RateRequest::custom(Hz hz, bool permission) {
    RateRequest r;
    r.custom_hz = hz;
    r.high_rate_permission = permission;
    return r;
}

DeviceProfile::DeviceProfile(std::string name, int android_version,
                             std::map<Sensor, SensorCaps> sensors)
    : name_(std::move(name)), android_version_(android_version),
      sensors_(std::move(sensors)) {
    if (name_.empty()) throw InputError("profile: device name must not be empty");
    if (sensors_.empty()) throw InputError("profile '" + name_ + "': no sensors");
    for (const auto& [sensor, caps] : sensors_) {
        validate_caps(name_, sensor, caps);
    }
}

const SensorCaps& DeviceProfile::caps(Sensor s) const {
    auto it = sensors_.find(s);
    if (it == sensors_.end()) {
        throw InvariantError("profile '" + name_ + "' does not cover " +
                             std::string(to_string(s)));
    }
    return it->second;
}

Hz DetectionThreshold::at(Sensor s) const {
    auto it = threshold_hz.find(s);
    if (it == threshold_hz.end()) {
        throw InvariantError("no threshold for " + std::string(to_string(s)));
    }
    return it->second;
}

DetectionThreshold thresholds_for(const DeviceProfile& profile) {
    DetectionThreshold t;
    for (const auto& [sensor, caps] : profile.sensors()) {
        t.threshold_hz[sensor] = caps.f_min + kThresholdMarginHz;
    }
    return t;
}

Hz resolve_request(const DeviceProfile& profile, Sensor sensor,
                   const RateRequest& request) {
    const SensorCaps& caps = profile.caps(sensor);
    Hz granted;
    if (request.is_named()) {
        granted = caps.constant_map.at(*request.constant);
    } else {
        if (request.custom_hz <= 0.0) {
            throw InputError("requested rate must be positive");
        }
        granted = snap_up(caps.supported_rates, request.custom_hz);
    }
    if (!request.high_rate_permission && caps.cap_unpermitted) {
        granted = std::min(granted, *caps.cap_unpermitted);
    }
    return granted;
}

RateClass classify_rate(const DeviceProfile& profile, Sensor sensor, Hz observed) {
    const SensorCaps& caps = profile.caps(sensor);
    RateClass best;
    best.nearest_hz = observed;
    double best_dist = 1.0 + kRateEps;  // named match requires |Δ| <= 1 Hz
    for (auto c : {DelayConstant::Normal, DelayConstant::Ui, DelayConstant::Game,
                   DelayConstant::Fastest}) {
        Hz v = caps.constant_map.at(c);
        double d = std::fabs(observed - v);
        if (d < best_dist) {
            best_dist = d;
            best.constant = c;
            best.nearest_hz = v;
        }
    }
    return best;
}

DeviceProfile synthesize_profile(std::string name, int android_version,
                                 const std::map<Sensor, Hz>& f_min) {
    std::map<Sensor, SensorCaps> sensors;
    for (const auto& [sensor, fm] : f_min) {
        sensors[sensor] = synthesize_caps(sensor, fm, android_version);
    }
    return DeviceProfile(std::move(name), android_version, std::move(sensors));
}

const std::vector<DeviceProfile>& builtin_profiles() {
    static const std::vector<DeviceProfile> profiles = [] {
        using S = Sensor;
        std::vector<DeviceProfile> v;
        v.push_back(synthesize_profile("Google Pixel 3", 12,
                                       {{S::Accelerometer, 5.0}, {S::Gyroscope, 1.0}, {S::Magnetometer, 1.0}}));
        v.push_back(synthesize_profile("Google Pixel 5", 12,
                                       {{S::Accelerometer, 5.0}, {S::Gyroscope, 1.0}, {S::Magnetometer, 1.0}}));
        v.push_back(synthesize_profile("Google Pixel 6", 13,
                                       {{S::Accelerometer, 7.0}, {S::Gyroscope, 2.0}, {S::Magnetometer, 1.0}}));
        v.push_back(synthesize_profile("OnePlus Nord N200", 12,
                                       {{S::Accelerometer, 5.0}, {S::Gyroscope, 1.0}, {S::Magnetometer, 1.0}}));
        v.push_back(synthesize_profile("Samsung Galaxy S9", 10,
                                       {{S::Accelerometer, 1.0}, {S::Gyroscope, 1.0}, {S::Magnetometer, 1.0}}));
        v.push_back(synthesize_profile("Samsung Galaxy S20", 13,
                                       {{S::Accelerometer, 1.0}, {S::Gyroscope, 1.0}, {S::Magnetometer, 1.0}}));
        return v;
    }();
    return profiles;
}

const DeviceProfile* find_builtin(std::string_view name) {
    const std::string query = normalize_name(name);
    if (query.empty()) return nullptr;
    for (const DeviceProfile& p : builtin_profiles()) {
        if (normalize_name(p.name()) == query) return &p;
    }
    const DeviceProfile* unique_match = nullptr;
    for (const DeviceProfile& p : builtin_profiles()) {
        if (normalize_name(p.name()).find(query) != std::string::npos) {
            if (unique_match) return nullptr;  // ambiguous
            unique_match = &p;
        }
    }
    return unique_match;
}

namespace {

struct Line {
    int number = 0;
    std::string key;
    std::string value;
    std::optional<Sensor> section;  // section header line
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError("profile line " + std::to_string(line_no) +
                         ": expected a number, got '" + text + "'");
    }
}

std::vector<Hz> parse_rate_list(const std::string& text, int line_no) {
    std::vector<Hz> out;
    std::istringstream iss(text);
    std::string tok;
    while (iss >> tok) out.push_back(parse_number(tok, line_no));
    if (out.empty()) {
        throw InputError("profile line " + std::to_string(line_no) + ": empty rate list");
    }
    return out;
}

struct SectionData {
    std::optional<Hz> f_min;
    std::optional<std::vector<Hz>> supported;
    std::optional<std::optional<Hz>> cap;  // outer: key present, inner: value or none
    std::optional<std::map<DelayConstant, Hz>> constants;
    int line = 0;
};

}  // namespace

DeviceProfile parse_profile(std::istream& in) {
    std::string device;
    std::optional<int> android_version;
    std::map<Sensor, SectionData> sections;
    Sensor current_sensor{};
    bool in_section = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InputError("profile line " + std::to_string(line_no) +
                                 ": unterminated section header");
            }
            std::string name = trim(line.substr(1, line.size() - 2));
            auto sensor = sensor_from_string(name);
            if (!sensor) {
                throw InputError("profile line " + std::to_string(line_no) +
                                 ": unknown sensor kind '" + name + "'");
            }
            if (sections.count(*sensor)) {
                throw InputError("profile line " + std::to_string(line_no) +
                                 ": duplicate section [" + name + "]");
            }
            current_sensor = *sensor;
            in_section = true;
            sections[*sensor].line = line_no;
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("profile line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!in_section) {
            if (key == "device") {
                device = value;
            } else if (key == "android_version") {
                android_version = static_cast<int>(parse_number(value, line_no));
            } else {
                throw InputError("profile line " + std::to_string(line_no) +
                                 ": unknown key '" + key + "'");
            }
            continue;
        }
        SectionData& sec = sections[current_sensor];
        if (key == "f_min") {
            sec.f_min = parse_number(value, line_no);
        } else if (key == "supported_rates") {
            sec.supported = parse_rate_list(value, line_no);
        } else if (key == "cap_unpermitted") {
            if (value == "none") {
                sec.cap = std::optional<Hz>{};
            } else {
                sec.cap = std::optional<Hz>{parse_number(value, line_no)};
            }
        } else if (key == "constants") {
            std::map<DelayConstant, Hz> m;
            std::istringstream iss(value);
            std::string tok;
            while (iss >> tok) {
                size_t sep = tok.find('=');
                if (sep == std::string::npos) {
                    throw InputError("profile line " + std::to_string(line_no) +
                                     ": constants entries look like name=rate");
                }
                auto c = delay_constant_from_string(tok.substr(0, sep));
                if (!c) {
                    throw InputError("profile line " + std::to_string(line_no) +
                                     ": unknown constant '" + tok.substr(0, sep) + "'");
                }
                m[*c] = parse_number(tok.substr(sep + 1), line_no);
            }
            sec.constants = std::move(m);
        } else {
            throw InputError("profile line " + std::to_string(line_no) +
                             ": unknown key '" + key + "'");
        }
    }

    if (device.empty()) throw InputError("profile: missing 'device' entry");
    if (sections.empty()) throw InputError("profile: no sensor sections");
    const int version = android_version.value_or(0);

    std::map<Sensor, SensorCaps> caps_map;
    for (const auto& [sensor, sec] : sections) {
        if (!sec.f_min) {
            throw InputError("profile section [" + std::string(to_string(sensor)) +
                             "]: missing f_min");
        }
        SensorCaps caps = synthesize_caps(sensor, *sec.f_min, version);
        if (sec.supported) {
            caps.supported_rates = *sec.supported;
            // Re-snap the synthesized constants onto the explicit rate set.
            for (auto& [c, v] : caps.constant_map) {
                v = snap_up(caps.supported_rates, v);
            }
            if (caps.cap_unpermitted &&
                !contains_rate(caps.supported_rates, *caps.cap_unpermitted)) {
                caps.cap_unpermitted.reset();
            }
        }
        if (sec.constants) {
            for (const auto& [c, v] : *sec.constants) caps.constant_map[c] = v;
        }
        if (sec.cap) caps.cap_unpermitted = *sec.cap;
        caps_map[sensor] = std::move(caps);
    }
    return DeviceProfile(device, version, std::move(caps_map));
}

DeviceProfile load_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open profile file '" + path + "'");
    try {
        return parse_profile(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string write_profile(const DeviceProfile& profile) {
    std::ostringstream out;
    out << "device = " << profile.name() << "\n";
    out << "android_version = " << profile.android_version() << "\n";
    for (const auto& [sensor, caps] : profile.sensors()) {
        out << "\n[" << to_string(sensor) << "]\n";
        out << "f_min = " << fmt_hz(caps.f_min) << "\n";
        out << "supported_rates =";
        for (Hz r : caps.supported_rates) out << " " << fmt_hz(r);
        out << "\n";
        out << "cap_unpermitted = "
            << (caps.cap_unpermitted ? fmt_hz(*caps.cap_unpermitted) : "none") << "\n";
        out << "constants =";
        for (const auto& [c, v] : caps.constant_map) {
            out << " " << to_string(c) << "=" << fmt_hz(v);
        }
        out << "\n";
    }
    return out.str();
}

DeviceProfile resolve_profile_arg(const std::string& name_or_path) {
    if (const DeviceProfile* p = find_builtin(name_or_path)) return *p;
    std::ifstream probe(name_or_path);
    if (probe) return load_profile_file(name_or_path);
    std::string names;
    for (const DeviceProfile& p : builtin_profiles()) {
        if (!names.empty()) names += ", ";
        names += p.name();
    }
    throw InputError("unknown device profile '" + name_or_path +
                     "': not a builtin (" + names + ") and not a readable file");
}

}  // namespace ratewatch
