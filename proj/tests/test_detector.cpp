#include "ratewatch/detector.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace ratewatch;

namespace {

RateSeries series_of(const std::vector<double>& rates, bool cleaned = false) {
    RateSeries s;
    for (size_t i = 0; i < rates.size(); ++i) {
        s.points.push_back({static_cast<int64_t>((i + 1) * 10'000'000), rates[i]});
    }
    s.cleaned = cleaned;
    return s;
}

std::vector<double> rates_of(const RateSeries& s) {
    std::vector<double> out;
    for (const RatePoint& p : s.points) out.push_back(p.rate);
    return out;
}

// Reference cleaner: rescan from scratch after every single fold. Quadratic,
// but obviously faithful to the rule; the production path must agree with it.
std::vector<double> naive_clean(std::vector<double> rates, double bucket_hz) {
    if (rates.size() < 3) return rates;
    auto bucket = [&](double r) { return std::lround(r / bucket_hz); };
    for (;;) {
        struct Run {
            size_t first, last;
        };
        std::vector<Run> runs;
        for (size_t i = 0; i < rates.size();) {
            size_t j = i;
            while (j + 1 < rates.size() && bucket(rates[j + 1]) == bucket(rates[i])) ++j;
            runs.push_back({i, j});
            i = j + 1;
        }
        bool folded = false;
        for (size_t r = 1; r + 1 < runs.size(); ++r) {
            if (runs[r].last - runs[r].first + 1 >= 3) continue;
            double mean = 0.0;
            for (size_t i = runs[r].first; i <= runs[r].last; ++i) mean += rates[i];
            mean /= static_cast<double>(runs[r].last - runs[r].first + 1);
            const double pv = rates[runs[r].first - 1];
            const double nv = rates[runs[r].last + 1];
            const double v = std::fabs(mean - pv) <= std::fabs(mean - nv) ? pv : nv;
            for (size_t i = runs[r].first; i <= runs[r].last; ++i) rates[i] = v;
            folded = true;
            break;
        }
        if (!folded) return rates;
    }
}

}  // namespace

TEST_CASE("instantaneous rates") {
    SensorEventTrace t;
    t.sensor = Sensor::Gyroscope;
    t.timestamps_ns = {0, 200'000'000, 400'000'000, 419'230'769};
    const RateSeries s = instant_rates(t);
    CHECK(s.sensor == Sensor::Gyroscope);
    REQUIRE(s.points.size() == 3);
    // Rate carries the timestamp of the later event of each pair.
    CHECK(s.points[0].t_ns == 200'000'000);
    CHECK(s.points[0].rate == 5.0);
    CHECK(s.points[1].rate == 5.0);
    CHECK(s.points[2].t_ns == 419'230'769);
    // 1e9 / 19230769 ns, the 52 Hz delivery period rounded to integer ns.
    CHECK(s.points[2].rate == doctest::Approx(52.000000625).epsilon(1e-9));
    CHECK_FALSE(s.degenerate);

    SUBCASE("one event is not a rate") {
        t.timestamps_ns = {5};
        CHECK(instant_rates(t).degenerate);
    }
    SUBCASE("non-increasing timestamps are a broken trace") {
        t.timestamps_ns = {0, 10, 10};
        CHECK_THROWS_AS(instant_rates(t), InvariantError);
        t.timestamps_ns = {0, 10, 5};
        CHECK_THROWS_AS(instant_rates(t), InvariantError);
    }
}

TEST_CASE("outlier cleaning") {
    SUBCASE("interior short run folds to the closer neighbor's edge value") {
        const RateSeries in = series_of({5.0, 5.02, 5.04, 9.7, 9.72, 5.01, 5.03, 4.98});
        const RateSeries out = clean_outliers(in);
        CHECK(out.cleaned);
        // Run mean 9.71 is equidistant-ish: |9.71-5.04| < |9.71-5.01| is false,
        // 4.67 vs 4.70, so the preceding edge 5.04 wins.
        CHECK(rates_of(out) ==
              std::vector<double>{5.0, 5.02, 5.04, 5.04, 5.04, 5.01, 5.03, 4.98});
        // Timestamps never move.
        for (size_t i = 0; i < in.points.size(); ++i) {
            CHECK(out.points[i].t_ns == in.points[i].t_ns);
        }
    }
    SUBCASE("exact tie prefers the preceding run") {
        const RateSeries out = clean_outliers(series_of({4.0, 4.0, 4.0, 6.0, 8.0, 8.0, 8.0}));
        CHECK(rates_of(out) == std::vector<double>{4.0, 4.0, 4.0, 4.0, 8.0, 8.0, 8.0});
    }
    SUBCASE("boundary runs are kept even when short") {
        const RateSeries out = clean_outliers(series_of({9.7, 5.0, 5.01, 5.02, 9.9}));
        CHECK(rates_of(out) == std::vector<double>{9.7, 5.0, 5.01, 5.02, 9.9});
    }
    SUBCASE("a fold can cascade into further folds") {
        // The 6.0 pair folds into the 5s, which leaves the 7.0 pair interior
        // and short; everything collapses onto the leading plateau.
        const RateSeries out = clean_outliers(
            series_of({5.0, 5.0, 5.0, 6.0, 6.0, 7.0, 7.0, 52.0, 52.0, 52.0}));
        const std::vector<double> got = rates_of(out);
        const std::vector<double> want = naive_clean(
            {5.0, 5.0, 5.0, 6.0, 6.0, 7.0, 7.0, 52.0, 52.0, 52.0}, 0.1);
        CHECK(got == want);
        CHECK(got == std::vector<double>{5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 52.0, 52.0,
                                         52.0});
    }
    SUBCASE("under three samples is degenerate and untouched") {
        const RateSeries out = clean_outliers(series_of({5.0, 9.0}));
        CHECK(out.degenerate);
        CHECK(rates_of(out) == std::vector<double>{5.0, 9.0});
    }
    SUBCASE("matches the rescan-from-scratch reference on random input") {
        std::mt19937_64 eng(20240817);
        auto uniform = [&](double lo, double hi) {
            return lo + (hi - lo) * std::ldexp(static_cast<double>(eng() >> 11), -53);
        };
        for (int iter = 0; iter < 300; ++iter) {
            std::vector<double> rates;
            const int plateaus = 1 + static_cast<int>(eng() % 5);
            for (int p = 0; p < plateaus; ++p) {
                const double base = uniform(1.0, 100.0);
                const int len = 1 + static_cast<int>(eng() % 5);
                for (int i = 0; i < len; ++i) rates.push_back(base + uniform(-0.03, 0.03));
            }
            const std::vector<double> want = naive_clean(rates, 0.1);
            const std::vector<double> got = rates_of(clean_outliers(series_of(rates)));
            REQUIRE(got.size() == want.size());
            CHECK(got == want);
        }
    }
    SUBCASE("non-positive bucket width is rejected") {
        CHECK_THROWS_AS(clean_outliers(series_of({1.0, 2.0, 3.0}), 0.0), InvariantError);
    }
}

TEST_CASE("usage interval extraction") {
    DetectionThreshold thr;
    thr.threshold_hz[Sensor::Accelerometer] = 5.5;

    auto detect = [&](const std::vector<std::pair<int64_t, double>>& pts,
                      DetectorConfig cfg = {}) {
        RateSeries s;
        s.cleaned = true;
        for (const auto& [t, r] : pts) s.points.push_back({t, r});
        return detect_usage(s, thr, Sensor::Accelerometer, cfg);
    };
    const int64_t ms = 1'000'000;

    SUBCASE("one stretch above threshold") {
        const auto out = detect({{0, 5.0},
                                 {100 * ms, 5.1},
                                 {200 * ms, 52.0},
                                 {350 * ms, 52.1},
                                 {500 * ms, 51.9},
                                 {600 * ms, 5.0}});
        REQUIRE(out.size() == 1);
        CHECK(out[0].start_ns == 200 * ms);
        CHECK(out[0].end_ns == 500 * ms);
        CHECK(out[0].estimated_rate == 52.1);  // peak, not mean
        CHECK(out[0].duration_s() == doctest::Approx(0.3));
        CHECK(out[0].phase == UsagePhase::Unknown);
    }
    SUBCASE("gaps under half a second merge, bigger gaps do not") {
        const auto merged = detect({{0, 52.0},
                                    {100 * ms, 52.0},
                                    {200 * ms, 5.0},
                                    {599 * ms, 52.0},
                                    {700 * ms, 52.0}});
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].start_ns == 0);
        CHECK(merged[0].end_ns == 700 * ms);

        const auto split = detect({{0, 52.0},
                                   {100 * ms, 52.0},
                                   {200 * ms, 5.0},
                                   {601 * ms, 52.0},
                                   {800 * ms, 52.0}});
        REQUIRE(split.size() == 2);
        CHECK(split[0].end_ns == 100 * ms);
        CHECK(split[1].start_ns == 601 * ms);
    }
    SUBCASE("short blips are discarded") {
        const auto out = detect({{0, 5.0}, {50 * ms, 52.0}, {140 * ms, 52.0}, {200 * ms, 5.0}});
        CHECK(out.empty());  // 90 ms above threshold, minimum is 100

        DetectorConfig cfg;
        cfg.min_duration_ms = 80;
        CHECK(detect({{0, 5.0}, {50 * ms, 52.0}, {140 * ms, 52.0}, {200 * ms, 5.0}}, cfg)
                  .size() == 1);
    }
    SUBCASE("threshold is exclusive") {
        CHECK(detect({{0, 5.5}, {100 * ms, 5.5}, {200 * ms, 5.5}}).empty());
        CHECK(detect({{0, 5.6}, {100 * ms, 5.6}, {200 * ms, 5.6}}).size() == 1);
    }
    SUBCASE("uncleaned input is rejected") {
        RateSeries raw = series_of({52.0, 52.0, 52.0});
        CHECK_THROWS_AS(detect_usage(raw, thr, Sensor::Accelerometer, {}), InvariantError);
    }
    SUBCASE("missing threshold yields nothing") {
        RateSeries s = series_of({52.0, 52.0, 52.0}, true);
        CHECK(detect_usage(s, thr, Sensor::Gyroscope, {}).empty());
    }
}

TEST_CASE("full pipeline over raw traces") {
    const DeviceProfile* oneplus = find_builtin("OnePlus Nord N200");
    REQUIRE(oneplus != nullptr);

    // 2 s of 52 Hz embedded in a 5 Hz background stream, all integer periods.
    SensorEventTrace acc;
    acc.sensor = Sensor::Accelerometer;
    int64_t t = 0;
    for (int i = 0; i < 10; ++i) acc.timestamps_ns.push_back(t += 200'000'000);  // 5 Hz
    for (int i = 0; i < 104; ++i) acc.timestamps_ns.push_back(t += 19'230'769);  // 52 Hz
    for (int i = 0; i < 10; ++i) acc.timestamps_ns.push_back(t += 200'000'000);

    SensorEventTrace gyro;
    gyro.sensor = Sensor::Gyroscope;
    for (int64_t g = 1'000'000'000; g <= 6'000'000'000; g += 1'000'000'000) {
        gyro.timestamps_ns.push_back(g);  // 1 Hz, the gyro floor: never usage
    }

    std::map<Sensor, SensorEventTrace> traces = {{Sensor::Accelerometer, acc},
                                                 {Sensor::Gyroscope, gyro}};
    const UsageReport report = detect_all(traces, *oneplus);

    CHECK(report.device == "OnePlus Nord N200");
    CHECK(report.any_usage());
    CHECK_FALSE(report.all_three());
    REQUIRE(report.sensors.count(Sensor::Accelerometer) == 1);
    const SensorFinding& f = report.sensors.at(Sensor::Accelerometer);
    CHECK(f.threshold_hz == 5.5);
    REQUIRE(f.intervals.size() == 1);
    CHECK(f.intervals[0].estimated_rate == doctest::Approx(52.0).epsilon(1e-6));
    CHECK(f.intervals[0].classified.constant == DelayConstant::Game);
    // 103 fast gaps between the first and last above-threshold sample.
    CHECK(f.intervals[0].duration_s() == doctest::Approx(103 * 0.019230769).epsilon(1e-6));

    const SensorFinding& g = report.sensors.at(Sensor::Gyroscope);
    CHECK_FALSE(g.any_usage());
    CHECK_FALSE(g.insufficient);

    SUBCASE("sensors outside the profile are skipped with a note") {
        DeviceProfile accel_only = synthesize_profile("cut", 12, {{Sensor::Accelerometer, 5.0}});
        const UsageReport r = detect_all(traces, accel_only);
        CHECK(r.sensors.count(Sensor::Gyroscope) == 0);
        REQUIRE(!r.notes.empty());
        CHECK(r.notes.front() == "gyroscope: not covered by profile 'cut', skipped");
    }
    SUBCASE("two events are insufficient, not empty") {
        SensorEventTrace tiny;
        tiny.sensor = Sensor::Magnetometer;
        tiny.timestamps_ns = {0, 1'000'000'000};
        std::map<Sensor, SensorEventTrace> one = {{Sensor::Magnetometer, tiny}};
        const UsageReport r = detect_all(one, *oneplus);
        CHECK(r.sensors.at(Sensor::Magnetometer).insufficient);
        CHECK_FALSE(r.any_usage());
    }
    SUBCASE("mismatched trace key is a caller bug") {
        std::map<Sensor, SensorEventTrace> bad = {{Sensor::Gyroscope, acc}};
        CHECK_THROWS_AS(detect_all(bad, *oneplus), InvariantError);
    }
}
