#include "ratewatch/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratewatch/profiler.hpp"

namespace ratewatch {
namespace {

using ordered_json = nlohmann::ordered_json;

double j3(double v) { return round3(v); }

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream iss(s);
    while (std::getline(iss, cur, sep)) out.push_back(trim(cur));
    return out;
}

[[noreturn]] void fail_line(const std::string& what, int line_no, const std::string& detail) {
    throw InputError(what + " line " + std::to_string(line_no) + ": " + detail);
}

double parse_double(const std::string& text, const std::string& what, int line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        fail_line(what, line_no, "expected a number, got '" + text + "'");
    }
}

// "<value> <unit>" with unit in {s, ms}; returns seconds.
double parse_time_s(const std::string& text, const std::string& what, int line_no) {
    std::istringstream iss(text);
    std::string num, unit;
    iss >> num >> unit;
    std::string tail;
    if (num.empty() || unit.empty() || (iss >> tail)) {
        fail_line(what, line_no, "expected '<value> s|ms', got '" + text + "'");
    }
    const double v = parse_double(num, what, line_no);
    if (unit == "s") return v;
    if (unit == "ms") return v / 1e3;
    fail_line(what, line_no, "unknown time unit '" + unit + "' (use s or ms)");
}

// Named constant, or "<value> hz|ms|us" (ms/us are sampling intervals).
RateRequest parse_rate_request(const std::string& text, const std::string& what,
                               int line_no) {
    if (auto c = delay_constant_from_string(text)) return RateRequest::named(*c);
    std::istringstream iss(text);
    std::string num, unit;
    iss >> num >> unit;
    std::string tail;
    if (num.empty() || unit.empty() || (iss >> tail)) {
        fail_line(what, line_no,
                  "expected a delay constant or '<value> hz|ms|us', got '" + text + "'");
    }
    const double v = parse_double(num, what, line_no);
    if (v <= 0.0) fail_line(what, line_no, "rate values must be positive");
    if (unit == "hz") return RateRequest::custom(v);
    if (unit == "ms") return RateRequest::custom(1e3 / v);
    if (unit == "us") return RateRequest::custom(1e6 / v);
    fail_line(what, line_no, "unknown rate unit '" + unit + "' (use hz, ms or us)");
}

}  // namespace

std::string write_trace_csv(const std::map<Sensor, SensorEventTrace>& traces) {
    std::ostringstream out;
    out << "sensor,timestamp_ns\n";
    for (const auto& [sensor, trace] : traces) {
        for (int64_t t : trace.timestamps_ns) {
            out << to_string(sensor) << "," << t << "\n";
        }
    }
    return out.str();
}

std::map<Sensor, SensorEventTrace> parse_trace_csv(std::istream& in) {
    std::map<Sensor, SensorEventTrace> traces;
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw InputError("trace: empty file, expected header");
    ++line_no;
    if (trim(line) != "sensor,timestamp_ns") {
        throw InputError("trace line 1: expected header 'sensor,timestamp_ns'");
    }
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const size_t comma = row.find(',');
        if (comma == std::string::npos) {
            fail_line("trace", line_no, "expected 'sensor,timestamp_ns'");
        }
        const std::string name = trim(row.substr(0, comma));
        auto sensor = sensor_from_string(name);
        if (!sensor) fail_line("trace", line_no, "unknown sensor '" + name + "'");
        int64_t ts = 0;
        try {
            ts = std::stoll(trim(row.substr(comma + 1)));
        } catch (const std::exception&) {
            fail_line("trace", line_no, "bad timestamp '" + row.substr(comma + 1) + "'");
        }
        SensorEventTrace& trace = traces[*sensor];
        trace.sensor = *sensor;
        if (!trace.timestamps_ns.empty() && ts <= trace.timestamps_ns.back()) {
            fail_line("trace", line_no,
                      std::string(to_string(*sensor)) + " timestamps must be ascending");
        }
        trace.timestamps_ns.push_back(ts);
    }
    return traces;
}

std::map<Sensor, SensorEventTrace> load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file '" + path + "'");
    try {
        return parse_trace_csv(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_trace_file(const std::string& path,
                     const std::map<Sensor, SensorEventTrace>& traces) {
    write_text_file(path, write_trace_csv(traces));
}

namespace {

ordered_json phases_to_json(const PhaseTimeline& phases) {
    ordered_json arr = ordered_json::array();
    for (const PhaseWindow& w : phases) {
        arr.push_back({{"phase", to_string(w.phase)},
                       {"start_ns", w.start_ns},
                       {"end_ns", w.end_ns}});
    }
    return arr;
}

PhaseTimeline phases_from_json(const ordered_json& arr) {
    PhaseTimeline out;
    for (const auto& e : arr) {
        PhaseWindow w;
        auto phase = phase_from_string(e.at("phase").get<std::string>());
        if (!phase) throw InputError("ground truth: unknown phase name");
        w.phase = *phase;
        w.start_ns = e.at("start_ns").get<int64_t>();
        w.end_ns = e.at("end_ns").get<int64_t>();
        out.push_back(w);
    }
    return out;
}

}  // namespace

std::string write_ground_truth(const GroundTruthLog& truth) {
    ordered_json doc;
    doc["scenario"] = truth.scenario;
    doc["device"] = truth.device;
    doc["duration_s"] = j3(truth.duration_s);
    doc["seed"] = truth.seed;
    if (truth.phases) doc["phases"] = phases_to_json(*truth.phases);
    ordered_json sensors = ordered_json::object();
    for (const auto& [sensor, intervals] : truth.intervals) {
        ordered_json arr = ordered_json::array();
        for (const GroundTruthInterval& gt : intervals) {
            arr.push_back({{"start_ns", gt.start_ns},
                           {"end_ns", gt.end_ns},
                           {"rate_hz", j3(gt.rate_hz)},
                           {"apps", gt.app_ids},
                           {"state", to_string(gt.state)}});
        }
        sensors[std::string(to_string(sensor))] = std::move(arr);
    }
    doc["sensors"] = std::move(sensors);
    return doc.dump(2) + "\n";
}

GroundTruthLog parse_ground_truth(std::istream& in) {
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw InputError(std::string("ground truth: invalid JSON: ") + e.what());
    }
    GroundTruthLog truth;
    try {
        truth.scenario = doc.value("scenario", std::string{});
        truth.device = doc.value("device", std::string{});
        truth.duration_s = doc.value("duration_s", 0.0);
        truth.seed = doc.value("seed", uint64_t{0});
        if (doc.contains("phases")) truth.phases = phases_from_json(doc["phases"]);
        for (const auto& [name, arr] : doc.at("sensors").items()) {
            auto sensor = sensor_from_string(name);
            if (!sensor) throw InputError("ground truth: unknown sensor '" + name + "'");
            std::vector<GroundTruthInterval>& out = truth.intervals[*sensor];
            for (const auto& e : arr) {
                GroundTruthInterval gt;
                gt.start_ns = e.at("start_ns").get<int64_t>();
                gt.end_ns = e.at("end_ns").get<int64_t>();
                gt.rate_hz = e.at("rate_hz").get<double>();
                if (e.contains("apps")) {
                    gt.app_ids = e["apps"].get<std::vector<std::string>>();
                }
                if (e.contains("state")) {
                    auto st = phase_from_string(e["state"].get<std::string>());
                    if (!st) throw InputError("ground truth: unknown state");
                    gt.state = *st;
                }
                out.push_back(std::move(gt));
            }
        }
    } catch (const ordered_json::exception& e) {
        throw InputError(std::string("ground truth: ") + e.what());
    }
    return truth;
}

GroundTruthLog load_ground_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open ground truth file '" + path + "'");
    try {
        return parse_ground_truth(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

namespace {

ordered_json evaluation_to_json(const EvaluationResult& ev) {
    ordered_json doc;
    doc["tp"] = ev.tp;
    doc["fp"] = ev.fp;
    doc["fn"] = ev.fn;
    doc["tn"] = ev.tn;
    doc["blind_spots"] = ev.blind_spots;
    doc["recall"] = j3(ev.recall());
    doc["precision"] = j3(ev.precision());
    doc["strict_recall"] = j3(ev.strict_recall());
    doc["rate_mae_hz"] = j3(ev.rate_mae_hz);
    doc["mean_boundary_err_ms"] = j3(ev.mean_boundary_err_ms);
    ordered_json per = ordered_json::array();
    for (const ScenarioScore& sc : ev.per_scenario) {
        per.push_back({{"scenario", sc.scenario},
                       {"tp", sc.tp},
                       {"fp", sc.fp},
                       {"fn", sc.fn},
                       {"tn", sc.tn},
                       {"blind_spots", sc.blind_spots},
                       {"baseline_clean", sc.baseline_clean},
                       {"all_found", sc.all_found}});
    }
    doc["per_scenario"] = std::move(per);
    return doc;
}

}  // namespace

std::string write_report(const UsageReport& report, const EvaluationResult* metrics) {
    ordered_json doc;
    doc["device"] = report.device;
    doc["min_duration_ms"] = report.min_duration_ms;
    doc["any_usage"] = report.any_usage();
    doc["all_three"] = report.all_three();
    ordered_json sensors = ordered_json::object();
    for (const auto& [sensor, finding] : report.sensors) {
        ordered_json f;
        f["threshold_hz"] = j3(finding.threshold_hz);
        f["insufficient"] = finding.insufficient;
        f["any_usage"] = finding.any_usage();
        ordered_json arr = ordered_json::array();
        for (const UsageInterval& iv : finding.intervals) {
            ordered_json e;
            e["start_ns"] = iv.start_ns;
            e["end_ns"] = iv.end_ns;
            e["duration_s"] = j3(iv.duration_s());
            e["rate_hz"] = j3(iv.estimated_rate);
            e["constant"] = iv.classified.constant
                                ? std::string(to_string(*iv.classified.constant))
                                : "custom";
            if (iv.phase != UsagePhase::Unknown) e["phase"] = to_string(iv.phase);
            arr.push_back(std::move(e));
        }
        f["intervals"] = std::move(arr);
        sensors[std::string(to_string(sensor))] = std::move(f);
    }
    doc["sensors"] = std::move(sensors);
    doc["notes"] = report.notes;
    doc["metrics"] = metrics ? evaluation_to_json(*metrics) : ordered_json(nullptr);
    return doc.dump(2) + "\n";
}

UsageReport parse_report(std::istream& in) {
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw InputError(std::string("report: invalid JSON: ") + e.what());
    }
    UsageReport report;
    try {
        report.device = doc.value("device", std::string{});
        report.min_duration_ms = doc.value("min_duration_ms", 100);
        for (const auto& [name, f] : doc.at("sensors").items()) {
            auto sensor = sensor_from_string(name);
            if (!sensor) throw InputError("report: unknown sensor '" + name + "'");
            SensorFinding finding;
            finding.threshold_hz = f.at("threshold_hz").get<double>();
            finding.insufficient = f.value("insufficient", false);
            for (const auto& e : f.at("intervals")) {
                UsageInterval iv;
                iv.sensor = *sensor;
                iv.start_ns = e.at("start_ns").get<int64_t>();
                iv.end_ns = e.at("end_ns").get<int64_t>();
                iv.estimated_rate = e.at("rate_hz").get<double>();
                const std::string constant = e.value("constant", "custom");
                if (constant != "custom") {
                    auto c = delay_constant_from_string(constant);
                    if (!c) throw InputError("report: unknown constant '" + constant + "'");
                    iv.classified.constant = *c;
                }
                iv.classified.nearest_hz = iv.estimated_rate;
                if (e.contains("phase")) {
                    auto p = phase_from_string(e["phase"].get<std::string>());
                    if (!p) throw InputError("report: unknown phase");
                    iv.phase = *p;
                }
                finding.intervals.push_back(std::move(iv));
            }
            report.sensors[*sensor] = std::move(finding);
        }
        if (doc.contains("notes")) {
            report.notes = doc["notes"].get<std::vector<std::string>>();
        }
    } catch (const ordered_json::exception& e) {
        throw InputError(std::string("report: ") + e.what());
    }
    return report;
}

UsageReport load_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open report file '" + path + "'");
    try {
        return parse_report(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string write_evaluation(const EvaluationResult& eval) {
    return evaluation_to_json(eval).dump(2) + "\n";
}

std::string write_aggregate(const AggregateStats& stats) {
    ordered_json doc;
    doc["population"] = stats.population;
    doc["any_sensor_users"] = stats.any_sensor_users;
    doc["all_three_users"] = stats.all_three_users;
    ordered_json per = ordered_json::object();
    ordered_json fractions = ordered_json::object();
    const double pop = std::max(1, stats.population);
    for (const auto& [sensor, n] : stats.per_sensor_users) {
        per[std::string(to_string(sensor))] = n;
        fractions[std::string(to_string(sensor))] = j3(n / pop);
    }
    fractions["any"] = j3(stats.any_sensor_users / pop);
    fractions["all_three"] = j3(stats.all_three_users / pop);
    doc["per_sensor_users"] = std::move(per);
    doc["fractions"] = std::move(fractions);
    ordered_json fg;
    fg["apps_total"] = stats.fg_bg.apps_total;
    fg["apps_with_usage"] = stats.fg_bg.apps_with_usage;
    fg["foreground_apps"] = stats.fg_bg.foreground_apps;
    fg["background_apps"] = stats.fg_bg.background_apps;
    fg["post_termination_apps"] = stats.fg_bg.post_termination_apps;
    fg["decreasing_pattern_apps"] = stats.fg_bg.decreasing_pattern_apps;
    fg["background_fraction"] = j3(stats.fg_bg.background_fraction());
    doc["fg_bg"] = std::move(fg);
    ordered_json hist;
    hist["bins"] = stats.histogram.bin_labels;
    ordered_json counts = ordered_json::object();
    for (const auto& [sensor, c] : stats.histogram.counts) {
        counts[std::string(to_string(sensor))] = c;
    }
    hist["counts"] = std::move(counts);
    ordered_json none = ordered_json::object();
    for (const auto& [sensor, n] : stats.histogram.no_usage) {
        none[std::string(to_string(sensor))] = n;
    }
    hist["no_usage"] = std::move(none);
    doc["histogram"] = std::move(hist);
    return doc.dump(2) + "\n";
}

std::string write_histogram_csv(const RateHistogram& histogram) {
    std::ostringstream out;
    out << "sensor,bin,count\n";
    for (const auto& [sensor, counts] : histogram.counts) {
        for (size_t i = 0; i < histogram.bin_labels.size(); ++i) {
            out << to_string(sensor) << "," << histogram.bin_labels[i] << ","
                << (i < counts.size() ? counts[i] : 0) << "\n";
        }
    }
    return out.str();
}

Scenario parse_scenario_text(std::istream& in) {
    Scenario scenario;
    std::optional<std::string> profile_arg;
    std::vector<std::pair<Sensor, RateRequest>> monitors;
    bool phases_standard = false;
    SimApp* current_app = nullptr;
    bool current_perm = false;  // high-rate permission of the current app section

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_line("scenario", line_no, "unterminated section");
            std::string header = trim(line.substr(1, line.size() - 2));
            if (header.rfind("app ", 0) != 0) {
                fail_line("scenario", line_no, "expected '[app <id>]' section");
            }
            SimApp app;
            app.id = trim(header.substr(4));
            if (app.id.empty()) fail_line("scenario", line_no, "app id must not be empty");
            scenario.apps.push_back(std::move(app));
            current_app = &scenario.apps.back();
            current_perm = false;
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail_line("scenario", line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (!current_app) {
            if (key == "name") {
                scenario.name = value;
            } else if (key == "profile") {
                profile_arg = value;
            } else if (key == "duration") {
                scenario.duration_s = parse_time_s(value, "scenario", line_no);
            } else if (key == "seed") {
                scenario.seed = static_cast<uint64_t>(
                    std::strtoull(value.c_str(), nullptr, 10));
            } else if (key == "noise_half_width_hz") {
                scenario.noise.half_width_hz = parse_double(value, "scenario", line_no);
            } else if (key == "monitor") {
                auto parts = split(value, ',');
                if (parts.size() != 2) {
                    fail_line("scenario", line_no, "monitor syntax: <sensor>, <rate>");
                }
                auto sensor = sensor_from_string(parts[0]);
                if (!sensor) fail_line("scenario", line_no, "unknown sensor '" + parts[0] + "'");
                monitors.emplace_back(*sensor,
                                      parse_rate_request(parts[1], "scenario", line_no));
            } else if (key == "phases") {
                if (value != "standard") {
                    fail_line("scenario", line_no, "phases only supports 'standard'");
                }
                phases_standard = true;
            } else {
                fail_line("scenario", line_no, "unknown key '" + key + "'");
            }
            continue;
        }

        if (key == "lifecycle") {
            for (const std::string& part : split(value, ',')) {
                std::istringstream iss(part);
                std::string num, unit, state_name;
                iss >> num >> unit >> state_name;
                if (state_name.empty()) {
                    fail_line("scenario", line_no,
                              "lifecycle entries look like '<time> s <state>'");
                }
                const double t = parse_time_s(num + " " + unit, "scenario", line_no);
                auto state = app_state_from_string(state_name);
                if (!state) {
                    fail_line("scenario", line_no, "unknown state '" + state_name + "'");
                }
                current_app->lifecycle.push_back({t, *state});
            }
        } else if (key == "persists_after_termination") {
            current_app->persists_after_termination = value == "true";
        } else if (key == "high_rate_permission") {
            current_perm = value == "true";
            for (SensorRegistration& reg : current_app->registrations) {
                reg.request.high_rate_permission = current_perm;
            }
        } else if (key == "register") {
            auto parts = split(value, ',');
            if (parts.size() != 4 && parts.size() != 5) {
                fail_line("scenario", line_no,
                          "register syntax: <sensor>, <rate>, <start>, <end>[, permission]");
            }
            auto sensor = sensor_from_string(parts[0]);
            if (!sensor) fail_line("scenario", line_no, "unknown sensor '" + parts[0] + "'");
            SensorRegistration reg;
            reg.sensor = *sensor;
            reg.request = parse_rate_request(parts[1], "scenario", line_no);
            reg.request.high_rate_permission = current_perm;
            reg.register_s = parse_time_s(parts[2], "scenario", line_no);
            reg.unregister_s = parse_time_s(parts[3], "scenario", line_no);
            if (parts.size() == 5) {
                if (parts[4] != "permission") {
                    fail_line("scenario", line_no,
                              "fifth register field must be 'permission'");
                }
                reg.request.high_rate_permission = true;
            }
            current_app->registrations.push_back(reg);
        } else {
            fail_line("scenario", line_no, "unknown key '" + key + "' in app section");
        }
    }

    if (!profile_arg) throw InputError("scenario: missing 'profile' entry");
    scenario.profile = resolve_profile_arg(*profile_arg);
    if (monitors.empty()) {
        for (const auto& [sensor, caps] : scenario.profile.sensors()) {
            scenario.monitor_request[sensor] = RateRequest::custom(caps.f_min);
        }
    } else {
        for (const auto& [sensor, req] : monitors) scenario.monitor_request[sensor] = req;
    }
    if (phases_standard) scenario.phases = standard_phase_timeline();
    scenario.validate();
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    try {
        return parse_scenario_text(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::optional<Scenario> canned_scenario(const std::string& name) {
    for (const CaseScenario& c : case_signature_scenarios()) {
        if (c.scenario.name == name) return c.scenario;
    }
    if (name == "standard_game") {
        SimApp app;
        app.id = "game_app";
        app.registrations.push_back(
            {Sensor::Accelerometer, RateRequest::named(DelayConstant::Game), 0.0, 30.0});
        const DeviceProfile* p = find_builtin("OnePlus Nord N200");
        Scenario s = standard_procedure_scenario(app, *p, 0);
        s.name = "standard_game";
        return s;
    }
    if (name == "no_usage") {
        const DeviceProfile* p = find_builtin("OnePlus Nord N200");
        Scenario s = make_scenario(*p, 1800.0, 0);
        s.name = "no_usage";
        return s;
    }
    return std::nullopt;
}

std::vector<std::string> canned_scenario_names() {
    std::vector<std::string> names;
    for (const CaseScenario& c : case_signature_scenarios()) {
        names.push_back(c.scenario.name);
    }
    names.push_back("standard_game");
    names.push_back("no_usage");
    return names;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file '" + path + "'");
    out << content;
    if (!out) throw InputError("failed writing file '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& file) {
    fs::create_directories(dir);
    return (fs::path(dir) / file).string();
}

int cmd_profile(const std::string& profile_arg, uint64_t seed, double dwell,
                const std::string& out_dir) {
    const DeviceProfile device = resolve_profile_arg(profile_arg);
    ProbePlan plan;
    plan.dwell_s = dwell;
    std::vector<Sensor> sensors;
    for (const auto& [sensor, caps] : device.sensors()) sensors.push_back(sensor);
    const ProbeFn probe = simulated_probe(device, plan.dwell_s, seed);
    const ProfileMeasurement m = profile_device(probe, plan, sensors);
    const DetectionThreshold thresholds = derive_thresholds(m);

    for (const auto& [sensor, f_min] : m.f_min) {
        std::cout << to_string(sensor) << ": f_min " << f_min << " Hz, threshold "
                  << thresholds.at(sensor) << " Hz\n";
    }
    for (Sensor s : m.unprofiled) {
        std::cout << to_string(s) << ": unprofiled (probe failed)\n";
    }
    std::cout << "simulated probing time: " << m.probing_time_s << " s\n";

    const DeviceProfile measured =
        measurement_to_profile(m, device.name(), device.android_version());
    const std::string path = out_path(out_dir, "profile.txt");
    write_text_file(path, write_profile(measured));
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_arg, std::optional<uint64_t> seed,
                 const std::string& profile_override, const std::string& out_dir) {
    Scenario scenario = [&] {
        if (fs::exists(scenario_arg)) return load_scenario_file(scenario_arg);
        if (auto s = canned_scenario(scenario_arg)) return *s;
        std::string names;
        for (const std::string& n : canned_scenario_names()) {
            if (!names.empty()) names += ", ";
            names += n;
        }
        throw InputError("unknown scenario '" + scenario_arg +
                         "': not a file and not one of: " + names);
    }();
    if (seed) scenario.seed = *seed;
    if (!profile_override.empty()) {
        scenario.profile = resolve_profile_arg(profile_override);
        scenario.monitor_request.clear();
        for (const auto& [sensor, caps] : scenario.profile.sensors()) {
            scenario.monitor_request[sensor] = RateRequest::custom(caps.f_min);
        }
    }
    const SimulationResult result = simulate(scenario);

    const std::string trace_path = out_path(out_dir, "trace.csv");
    save_trace_file(trace_path, result.traces);
    const std::string truth_path = out_path(out_dir, "ground_truth.json");
    write_text_file(truth_path, write_ground_truth(result.truth));

    size_t events = 0;
    for (const auto& [sensor, trace] : result.traces) events += trace.timestamps_ns.size();
    size_t gt = 0;
    for (const auto& [sensor, ivs] : result.truth.intervals) gt += ivs.size();
    std::cout << "wrote " << trace_path << " (" << events << " events) and " << truth_path
              << " (" << gt << " ground-truth intervals)\n";
    return 0;
}

int cmd_detect(const std::string& trace_path, const std::string& profile_arg,
               const std::string& truth_path, int min_duration_ms,
               const std::string& out_dir) {
    if (profile_arg.empty()) {
        throw InputError(
            "no device profile given: profiling is the required first step for every "
            "device model (run `ratewatch profile --profile <device> --out <dir>` once, "
            "then pass --profile here)");
    }
    const DeviceProfile profile = resolve_profile_arg(profile_arg);
    const auto traces = load_trace_file(trace_path);
    DetectorConfig config;
    config.min_duration_ms = min_duration_ms;
    UsageReport report = detect_all(traces, profile, config);

    std::optional<EvaluationResult> metrics;
    if (!truth_path.empty()) {
        const GroundTruthLog truth = load_ground_truth_file(truth_path);
        if (truth.phases) report = annotate_phases(report, *truth.phases, config);
        metrics = combine_scores({score_report(report, truth, config)});
    }

    const std::string report_path = out_path(out_dir, "report.json");
    write_text_file(report_path,
                    write_report(report, metrics ? &*metrics : nullptr));

    for (const auto& [sensor, finding] : report.sensors) {
        if (finding.insufficient) {
            std::cout << to_string(sensor) << ": insufficient data\n";
        } else if (finding.intervals.empty()) {
            std::cout << to_string(sensor) << ": no usage\n";
        } else {
            Hz peak = 0.0;
            for (const UsageInterval& iv : finding.intervals) {
                peak = std::max(peak, iv.estimated_rate);
            }
            std::cout << to_string(sensor) << ": " << finding.intervals.size()
                      << " interval(s), peak " << round3(peak) << " Hz\n";
        }
    }
    std::cout << "wrote " << report_path << "\n";
    return 0;
}

int cmd_evaluate(const std::vector<std::string>& report_paths,
                 const std::vector<std::string>& truth_paths,
                 const std::string& out_dir) {
    if (report_paths.size() != truth_paths.size()) {
        throw InputError("evaluate: need one --truth per --report (got " +
                         std::to_string(report_paths.size()) + " reports, " +
                         std::to_string(truth_paths.size()) + " truths)");
    }
    std::vector<ScenarioScore> scores;
    for (size_t i = 0; i < report_paths.size(); ++i) {
        const UsageReport report = load_report_file(report_paths[i]);
        const GroundTruthLog truth = load_ground_truth_file(truth_paths[i]);
        DetectorConfig config;
        config.min_duration_ms = report.min_duration_ms;
        scores.push_back(score_report(report, truth, config));
    }
    const EvaluationResult eval = combine_scores(std::move(scores));
    std::cout << "recall=" << round3(eval.recall())
              << " precision=" << round3(eval.precision())
              << " rate_mae_hz=" << round3(eval.rate_mae_hz)
              << " blind_spots=" << eval.blind_spots << "\n";
    if (!out_dir.empty()) {
        const std::string path = out_path(out_dir, "evaluation.json");
        write_text_file(path, write_evaluation(eval));
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& report_paths,
               const std::string& profile_arg, const std::string& out_dir) {
    const DeviceProfile profile = resolve_profile_arg(profile_arg);
    std::vector<UsageReport> reports;
    for (const std::string& path : report_paths) {
        reports.push_back(load_report_file(path));
    }
    const AggregateStats stats = aggregate_stats(reports, profile);
    const std::string agg_path = out_path(out_dir, "aggregate.json");
    write_text_file(agg_path, write_aggregate(stats));
    const std::string csv_path = out_path(out_dir, "histogram.csv");
    write_text_file(csv_path, write_histogram_csv(stats.histogram));
    std::cout << stats.population << " report(s): " << stats.any_sensor_users
              << " with usage, " << stats.all_three_users << " on all three sensors\n";
    std::cout << "wrote " << agg_path << " and " << csv_path << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"sensor sampling-rate monitor: simulate, detect, evaluate"};
    app.require_subcommand(1);

    auto* profile_cmd =
        app.add_subcommand("profile", "measure a simulated device's minimum rates");
    std::string p_profile, p_out = ".";
    uint64_t p_seed = 0;
    double p_dwell = 5.0;
    profile_cmd->add_option("--profile", p_profile, "device to probe (builtin name or file)")
        ->required();
    profile_cmd->add_option("--seed", p_seed, "probe noise seed");
    profile_cmd->add_option("--dwell", p_dwell, "seconds per probe");
    profile_cmd->add_option("--out", p_out, "output directory");

    auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario, write trace + truth");
    std::string s_scenario, s_profile, s_out = ".";
    std::optional<uint64_t> s_seed;
    simulate_cmd->add_option("--scenario", s_scenario, "scenario file or canned name")
        ->required();
    simulate_cmd->add_option("--seed", s_seed, "override the scenario seed");
    simulate_cmd->add_option("--profile", s_profile, "override the scenario device");
    simulate_cmd->add_option("--out", s_out, "output directory");

    auto* detect_cmd = app.add_subcommand("detect", "find usage intervals in a trace");
    std::string d_trace, d_profile, d_truth, d_out = ".";
    int d_min_duration = 100;
    detect_cmd->add_option("--trace", d_trace, "trace CSV file")->required();
    detect_cmd->add_option("--profile", d_profile, "device profile (builtin name or file)");
    detect_cmd->add_option("--truth", d_truth,
                           "ground truth JSON for phase labels and metrics");
    detect_cmd->add_option("--min-duration-ms", d_min_duration,
                           "discard intervals shorter than this");
    detect_cmd->add_option("--out", d_out, "output directory");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "score reports against ground truth");
    std::vector<std::string> e_reports, e_truths;
    std::string e_out;
    evaluate_cmd->add_option("--report", e_reports, "report JSON file(s)")->required();
    evaluate_cmd->add_option("--truth", e_truths, "ground truth JSON file(s)")->required();
    evaluate_cmd->add_option("--out", e_out, "output directory for evaluation.json");

    auto* report_cmd = app.add_subcommand("report", "aggregate reports into suite statistics");
    std::vector<std::string> r_reports;
    std::string r_profile, r_out = ".";
    report_cmd->add_option("reports", r_reports, "report JSON files")->required();
    report_cmd->add_option("--profile", r_profile, "device profile for histogram bins")
        ->required();
    report_cmd->add_option("--out", r_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*profile_cmd) return cmd_profile(p_profile, p_seed, p_dwell, p_out);
        if (*simulate_cmd) return cmd_simulate(s_scenario, s_seed, s_profile, s_out);
        if (*detect_cmd)
            return cmd_detect(d_trace, d_profile, d_truth, d_min_duration, d_out);
        if (*evaluate_cmd) return cmd_evaluate(e_reports, e_truths, e_out);
        if (*report_cmd) return cmd_report(r_reports, r_profile, r_out);
        throw InvariantError("no subcommand dispatched");
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ratewatch
