#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ratewatch/detector.hpp"
#include "ratewatch/device_model.hpp"
#include "ratewatch/harness.hpp"
#include "ratewatch/io.hpp"
#include "ratewatch/profiler.hpp"
#include "ratewatch/sim.hpp"

namespace py = pybind11;
using namespace ratewatch;

namespace {

// keep python-side errors distinguishable: InputError -> ValueError,
// InvariantError -> RuntimeError.
void translate_exceptions() {
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const InvariantError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sensor sampling-rate monitoring: device model, simulator, detector";
    m.attr("__version__") = "0.1.0";
    translate_exceptions();

    py::enum_<Sensor>(m, "Sensor")
        .value("ACCELEROMETER", Sensor::Accelerometer)
        .value("GYROSCOPE", Sensor::Gyroscope)
        .value("MAGNETOMETER", Sensor::Magnetometer);

    py::enum_<DelayConstant>(m, "DelayConstant")
        .value("NORMAL", DelayConstant::Normal)
        .value("UI", DelayConstant::Ui)
        .value("GAME", DelayConstant::Game)
        .value("FASTEST", DelayConstant::Fastest);

    py::enum_<UsagePhase>(m, "UsagePhase")
        .value("BASELINE", UsagePhase::Baseline)
        .value("FOREGROUND", UsagePhase::Foreground)
        .value("BACKGROUND", UsagePhase::Background)
        .value("POST_TERMINATION", UsagePhase::PostTermination)
        .value("UNKNOWN", UsagePhase::Unknown);

    py::enum_<AppState>(m, "AppState")
        .value("FOREGROUND", AppState::Foreground)
        .value("BACKGROUND", AppState::Background)
        .value("TERMINATED", AppState::Terminated);

    py::class_<RateRequest>(m, "RateRequest")
        .def_static("named", &RateRequest::named, py::arg("constant"),
                    py::arg("permission") = false)
        .def_static("custom", &RateRequest::custom, py::arg("hz"),
                    py::arg("permission") = false)
        .def_readwrite("constant", &RateRequest::constant)
        .def_readwrite("custom_hz", &RateRequest::custom_hz)
        .def_readwrite("high_rate_permission", &RateRequest::high_rate_permission)
        .def_property_readonly("is_named", &RateRequest::is_named);

    py::class_<SensorCaps>(m, "SensorCaps")
        .def_readonly("f_min", &SensorCaps::f_min)
        .def_readonly("supported_rates", &SensorCaps::supported_rates)
        .def_readonly("cap_unpermitted", &SensorCaps::cap_unpermitted)
        .def_readonly("constant_map", &SensorCaps::constant_map)
        .def_property_readonly("f_max", &SensorCaps::f_max);

    py::class_<DeviceProfile>(m, "DeviceProfile")
        .def_property_readonly("name", &DeviceProfile::name)
        .def_property_readonly("android_version", &DeviceProfile::android_version)
        .def("has", &DeviceProfile::has)
        .def("caps", &DeviceProfile::caps, py::return_value_policy::reference_internal)
        .def("__repr__", [](const DeviceProfile& p) {
            std::ostringstream os;
            os << "DeviceProfile('" << p.name() << "', android " << p.android_version()
               << ")";
            return os.str();
        });

    py::class_<DetectionThreshold>(m, "DetectionThreshold")
        .def_readonly("threshold_hz", &DetectionThreshold::threshold_hz)
        .def("at", &DetectionThreshold::at);

    py::class_<RateClass>(m, "RateClass")
        .def_readonly("constant", &RateClass::constant)
        .def_readonly("nearest_hz", &RateClass::nearest_hz);

    m.def("builtin_profiles", &builtin_profiles);
    m.def("find_builtin", [](const std::string& name) -> std::optional<DeviceProfile> {
        const DeviceProfile* p = find_builtin(name);
        if (!p) return std::nullopt;
        return *p;
    });
    m.def("synthesize_profile", &synthesize_profile, py::arg("name"),
          py::arg("android_version"), py::arg("f_min"));
    m.def("resolve_profile_arg", &resolve_profile_arg);
    m.def("load_profile_file", &load_profile_file);
    m.def("write_profile", &write_profile);
    m.def("thresholds_for", &thresholds_for);
    m.def("resolve_request", &resolve_request, py::arg("profile"), py::arg("sensor"),
          py::arg("request"));
    m.def("classify_rate", &classify_rate, py::arg("profile"), py::arg("sensor"),
          py::arg("observed"));

    py::class_<SensorRegistration>(m, "SensorRegistration")
        .def(py::init([](Sensor sensor, const RateRequest& request, double register_s,
                         double unregister_s) {
                 return SensorRegistration{sensor, request, register_s, unregister_s};
             }),
             py::arg("sensor"), py::arg("request"), py::arg("register_s"),
             py::arg("unregister_s"))
        .def_readwrite("sensor", &SensorRegistration::sensor)
        .def_readwrite("request", &SensorRegistration::request)
        .def_readwrite("register_s", &SensorRegistration::register_s)
        .def_readwrite("unregister_s", &SensorRegistration::unregister_s);

    py::class_<LifecycleEvent>(m, "LifecycleEvent")
        .def(py::init([](double time_s, AppState state) {
                 return LifecycleEvent{time_s, state};
             }),
             py::arg("time_s"), py::arg("state"))
        .def_readwrite("time_s", &LifecycleEvent::time_s)
        .def_readwrite("state", &LifecycleEvent::state);

    py::class_<SimApp>(m, "SimApp")
        .def(py::init<>())
        .def_readwrite("id", &SimApp::id)
        .def_readwrite("registrations", &SimApp::registrations)
        .def_readwrite("lifecycle", &SimApp::lifecycle)
        .def_readwrite("persists_after_termination", &SimApp::persists_after_termination)
        .def("validate", &SimApp::validate);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_readwrite("half_width_hz", &NoiseModel::half_width_hz)
        .def_readwrite("outlier_run_min", &NoiseModel::outlier_run_min)
        .def_readwrite("outlier_run_max", &NoiseModel::outlier_run_max);

    py::class_<PhaseWindow>(m, "PhaseWindow")
        .def_readonly("start_ns", &PhaseWindow::start_ns)
        .def_readonly("end_ns", &PhaseWindow::end_ns)
        .def_readonly("phase", &PhaseWindow::phase);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("profile", &Scenario::profile)
        .def_readwrite("monitor_request", &Scenario::monitor_request)
        .def_readwrite("apps", &Scenario::apps)
        .def_readwrite("duration_s", &Scenario::duration_s)
        .def_readwrite("noise", &Scenario::noise)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("phases", &Scenario::phases)
        .def("validate", &Scenario::validate);

    m.def("make_scenario", &make_scenario, py::arg("profile"), py::arg("duration_s"),
          py::arg("seed"));
    m.def("standard_procedure_scenario", &standard_procedure_scenario,
          py::arg("app_template"), py::arg("profile"), py::arg("seed") = 0);
    m.def("standard_phase_timeline", &standard_phase_timeline);
    m.def("arbitrate", [](const DeviceProfile& p, Sensor s, const std::vector<Hz>& granted) {
        return arbitrate(p, s, granted);
    });

    py::class_<SensorEventTrace>(m, "SensorEventTrace")
        .def(py::init<>())
        .def_readwrite("sensor", &SensorEventTrace::sensor)
        .def_readwrite("timestamps_ns", &SensorEventTrace::timestamps_ns);

    py::class_<GroundTruthInterval>(m, "GroundTruthInterval")
        .def_readonly("start_ns", &GroundTruthInterval::start_ns)
        .def_readonly("end_ns", &GroundTruthInterval::end_ns)
        .def_readonly("rate_hz", &GroundTruthInterval::rate_hz)
        .def_readonly("app_ids", &GroundTruthInterval::app_ids)
        .def_readonly("state", &GroundTruthInterval::state);

    py::class_<GroundTruthLog>(m, "GroundTruthLog")
        .def_readonly("scenario", &GroundTruthLog::scenario)
        .def_readonly("device", &GroundTruthLog::device)
        .def_readonly("duration_s", &GroundTruthLog::duration_s)
        .def_readonly("seed", &GroundTruthLog::seed)
        .def_readonly("intervals", &GroundTruthLog::intervals)
        .def_readonly("phases", &GroundTruthLog::phases)
        .def("to_json", &write_ground_truth);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("traces", &SimulationResult::traces)
        .def_readonly("truth", &SimulationResult::truth);

    m.def("simulate", &simulate);

    py::class_<RatePoint>(m, "RatePoint")
        .def_readonly("t_ns", &RatePoint::t_ns)
        .def_readonly("rate", &RatePoint::rate);

    py::class_<RateSeries>(m, "RateSeries")
        .def_readonly("sensor", &RateSeries::sensor)
        .def_readonly("points", &RateSeries::points)
        .def_readonly("cleaned", &RateSeries::cleaned)
        .def_readonly("degenerate", &RateSeries::degenerate);

    py::class_<DetectorConfig>(m, "DetectorConfig")
        .def(py::init<>())
        .def_readwrite("min_duration_ms", &DetectorConfig::min_duration_ms)
        .def_readwrite("merge_gap_ms", &DetectorConfig::merge_gap_ms)
        .def_readwrite("bucket_hz", &DetectorConfig::bucket_hz);

    py::class_<UsageInterval>(m, "UsageInterval")
        .def_readonly("sensor", &UsageInterval::sensor)
        .def_readonly("start_ns", &UsageInterval::start_ns)
        .def_readonly("end_ns", &UsageInterval::end_ns)
        .def_readonly("estimated_rate", &UsageInterval::estimated_rate)
        .def_readonly("classified", &UsageInterval::classified)
        .def_readonly("phase", &UsageInterval::phase)
        .def_property_readonly("duration_s", &UsageInterval::duration_s);

    py::class_<SensorFinding>(m, "SensorFinding")
        .def_readonly("threshold_hz", &SensorFinding::threshold_hz)
        .def_readonly("insufficient", &SensorFinding::insufficient)
        .def_readonly("intervals", &SensorFinding::intervals)
        .def_property_readonly("any_usage", &SensorFinding::any_usage);

    py::class_<UsageReport>(m, "UsageReport")
        .def_readonly("device", &UsageReport::device)
        .def_readonly("min_duration_ms", &UsageReport::min_duration_ms)
        .def_readonly("sensors", &UsageReport::sensors)
        .def_readonly("notes", &UsageReport::notes)
        .def_property_readonly("any_usage", &UsageReport::any_usage)
        .def_property_readonly("all_three", &UsageReport::all_three)
        .def("to_json", [](const UsageReport& r) { return write_report(r); });

    m.def("instant_rates", &instant_rates);
    m.def("clean_outliers", &clean_outliers, py::arg("series"), py::arg("bucket_hz") = 0.1);
    m.def("detect_usage", &detect_usage, py::arg("cleaned"), py::arg("threshold"),
          py::arg("sensor"), py::arg("config") = DetectorConfig{});
    m.def("detect_all", &detect_all, py::arg("traces"), py::arg("profile"),
          py::arg("config") = DetectorConfig{});

    py::class_<ProbePlan>(m, "ProbePlan")
        .def(py::init<>())
        .def_readwrite("candidate_rates", &ProbePlan::candidate_rates)
        .def_readwrite("dwell_s", &ProbePlan::dwell_s);

    py::class_<ProfileMeasurement>(m, "ProfileMeasurement")
        .def_readonly("f_min", &ProfileMeasurement::f_min)
        .def_readonly("unprofiled", &ProfileMeasurement::unprofiled)
        .def_readonly("probing_time_s", &ProfileMeasurement::probing_time_s);

    m.def("profile_device",
          [](const ProbeFn& probe, const ProbePlan& plan, const std::vector<Sensor>& sensors) {
              return profile_device(probe, plan, sensors);
          },
          py::arg("probe"), py::arg("plan"), py::arg("sensors"));
    m.def("derive_thresholds", &derive_thresholds);
    m.def("simulated_probe", &simulated_probe, py::arg("device"), py::arg("dwell_s"),
          py::arg("seed"), py::arg("noise") = NoiseModel{});
    m.def("measurement_to_profile", &measurement_to_profile, py::arg("measurement"),
          py::arg("device_name"), py::arg("android_version"));

    py::class_<ScenarioScore>(m, "ScenarioScore")
        .def_readonly("scenario", &ScenarioScore::scenario)
        .def_readonly("tp", &ScenarioScore::tp)
        .def_readonly("fp", &ScenarioScore::fp)
        .def_readonly("fn", &ScenarioScore::fn)
        .def_readonly("tn", &ScenarioScore::tn)
        .def_readonly("blind_spots", &ScenarioScore::blind_spots)
        .def_readonly("baseline_clean", &ScenarioScore::baseline_clean)
        .def_readonly("all_found", &ScenarioScore::all_found);

    py::class_<EvaluationResult>(m, "EvaluationResult")
        .def_readonly("tp", &EvaluationResult::tp)
        .def_readonly("fp", &EvaluationResult::fp)
        .def_readonly("fn", &EvaluationResult::fn)
        .def_readonly("tn", &EvaluationResult::tn)
        .def_readonly("blind_spots", &EvaluationResult::blind_spots)
        .def_readonly("rate_mae_hz", &EvaluationResult::rate_mae_hz)
        .def_readonly("mean_boundary_err_ms", &EvaluationResult::mean_boundary_err_ms)
        .def_readonly("per_scenario", &EvaluationResult::per_scenario)
        .def_property_readonly("recall", &EvaluationResult::recall)
        .def_property_readonly("precision", &EvaluationResult::precision)
        .def_property_readonly("strict_recall", &EvaluationResult::strict_recall)
        .def("to_json", &write_evaluation);

    py::class_<SuiteResult>(m, "SuiteResult")
        .def_readonly("reports", &SuiteResult::reports)
        .def_readonly("truths", &SuiteResult::truths)
        .def_readonly("eval", &SuiteResult::eval);

    py::class_<FgBgStats>(m, "FgBgStats")
        .def_readonly("apps_total", &FgBgStats::apps_total)
        .def_readonly("apps_with_usage", &FgBgStats::apps_with_usage)
        .def_readonly("foreground_apps", &FgBgStats::foreground_apps)
        .def_readonly("background_apps", &FgBgStats::background_apps)
        .def_readonly("post_termination_apps", &FgBgStats::post_termination_apps)
        .def_readonly("decreasing_pattern_apps", &FgBgStats::decreasing_pattern_apps)
        .def_property_readonly("background_fraction", &FgBgStats::background_fraction);

    py::class_<RateHistogram>(m, "RateHistogram")
        .def_readonly("bin_labels", &RateHistogram::bin_labels)
        .def_readonly("counts", &RateHistogram::counts)
        .def_readonly("no_usage", &RateHistogram::no_usage)
        .def("to_csv", &write_histogram_csv);

    py::class_<AggregateStats>(m, "AggregateStats")
        .def_readonly("population", &AggregateStats::population)
        .def_readonly("per_sensor_users", &AggregateStats::per_sensor_users)
        .def_readonly("any_sensor_users", &AggregateStats::any_sensor_users)
        .def_readonly("all_three_users", &AggregateStats::all_three_users)
        .def_readonly("fg_bg", &AggregateStats::fg_bg)
        .def_readonly("histogram", &AggregateStats::histogram)
        .def("to_json", &write_aggregate);

    py::class_<CaseExpectation>(m, "CaseExpectation")
        .def_readonly("sensor", &CaseExpectation::sensor)
        .def_readonly("interval_count", &CaseExpectation::interval_count);

    py::class_<CaseScenario>(m, "CaseScenario")
        .def_readonly("scenario", &CaseScenario::scenario)
        .def_readonly("description", &CaseScenario::description)
        .def_readonly("expectations", &CaseScenario::expectations);

    m.def("score_report", &score_report, py::arg("report"), py::arg("truth"),
          py::arg("config") = DetectorConfig{});
    m.def("combine_scores", &combine_scores);
    m.def("annotate_phases", &annotate_phases, py::arg("report"), py::arg("phases"),
          py::arg("config") = DetectorConfig{});
    m.def("run_standard_suite", &run_standard_suite, py::arg("apps"), py::arg("profile"),
          py::arg("seed"), py::arg("config") = DetectorConfig{});
    m.def("fg_bg_breakdown", &fg_bg_breakdown);
    m.def("rate_histogram", &rate_histogram);
    m.def("aggregate_stats", &aggregate_stats);
    m.def("case_signature_scenarios",
          py::overload_cast<>(&case_signature_scenarios));
    m.def("case_signature_scenarios",
          py::overload_cast<const DeviceProfile&>(&case_signature_scenarios));
    m.def("check_case", &check_case);
    m.def("game_rate_population", &game_rate_population);
    m.def("mixed_lifecycle_population", &mixed_lifecycle_population);

    m.def("write_trace_csv", &write_trace_csv);
    m.def("parse_trace_csv", [](const std::string& text) {
        std::istringstream in(text);
        return parse_trace_csv(in);
    });
    m.def("load_trace_file", &load_trace_file);
    m.def("save_trace_file", &save_trace_file);
    m.def("write_ground_truth", &write_ground_truth);
    m.def("load_ground_truth_file", &load_ground_truth_file);
    m.def("write_report", [](const UsageReport& r) { return write_report(r); });
    m.def("load_report_file", &load_report_file);
    m.def("parse_scenario_text", [](const std::string& text) {
        std::istringstream in(text);
        return parse_scenario_text(in);
    });
    m.def("load_scenario_file", &load_scenario_file);
    m.def("canned_scenario", &canned_scenario);
    m.def("canned_scenario_names", &canned_scenario_names);
    m.def("cli", [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("ratewatch");
        for (const std::string& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    });
}
