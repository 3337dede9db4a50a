#include "ratewatch/detector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace ratewatch {
namespace {

long bucket_of(double rate, double bucket_hz) {
    return std::lround(rate / bucket_hz);
}

}  // namespace

RateSeries instant_rates(const SensorEventTrace& trace) {
    RateSeries out;
    out.sensor = trace.sensor;
    const auto& ts = trace.timestamps_ns;
    for (size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] <= ts[i - 1]) {
            throw InvariantError(std::string(to_string(trace.sensor)) +
                                 " trace: timestamps must be strictly increasing");
        }
        out.points.push_back({ts[i], 1e9 / static_cast<double>(ts[i] - ts[i - 1])});
    }
    out.degenerate = out.points.empty();
    return out;
}

RateSeries clean_outliers(const RateSeries& series, double bucket_hz) {
    if (bucket_hz <= 0.0) throw InvariantError("bucket_hz must be positive");
    RateSeries out = series;
    out.cleaned = true;
    if (out.points.size() < 3) {
        out.degenerate = true;
        return out;
    }

    auto& pts = out.points;
    const int n = static_cast<int>(pts.size());

    // Runs of consecutive equal-bucket samples, linked so merges are O(1).
    // Short interior runs are repeatedly folded into their closer neighbor;
    // folding can itself create a short run, hence the work queue.
    std::vector<int> begin, end, prev, next;
    std::vector<long> bucket;
    std::vector<bool> alive;
    for (int i = 0; i < n;) {
        int j = i;
        long b = bucket_of(pts[i].rate, bucket_hz);
        while (j < n && bucket_of(pts[j].rate, bucket_hz) == b) ++j;
        int id = static_cast<int>(begin.size());
        begin.push_back(i);
        end.push_back(j);
        bucket.push_back(b);
        prev.push_back(id - 1);
        next.push_back(id + 1);
        alive.push_back(true);
        i = j;
    }
    const int run_count = static_cast<int>(begin.size());
    for (int id = 0; id < run_count; ++id) {
        if (next[id] == run_count) next[id] = -1;
    }

    auto coalesce = [&](int a) {
        // Absorb a's successor while they share a bucket.
        while (next[a] != -1 && bucket[next[a]] == bucket[a]) {
            int b = next[a];
            end[a] = end[b];
            next[a] = next[b];
            if (next[a] != -1) prev[next[a]] = a;
            alive[b] = false;
        }
    };

    std::deque<int> work(run_count);
    std::iota(work.begin(), work.end(), 0);
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        if (!alive[id]) continue;
        if (end[id] - begin[id] >= 3) continue;
        int p = prev[id], nx = next[id];
        if (p == -1 || nx == -1) continue;  // boundary runs are kept as-is

        double mean = 0.0;
        for (int i = begin[id]; i < end[id]; ++i) mean += pts[i].rate;
        mean /= static_cast<double>(end[id] - begin[id]);
        const double pv = pts[end[p] - 1].rate;  // facing edge of each neighbor
        const double nv = pts[begin[nx]].rate;
        const bool into_prev = std::fabs(mean - pv) <= std::fabs(mean - nv);
        const double replacement = into_prev ? pv : nv;
        for (int i = begin[id]; i < end[id]; ++i) pts[i].rate = replacement;

        int target = into_prev ? p : nx;
        if (into_prev) {
            end[p] = end[id];
            next[p] = nx;
            prev[nx] = p;
        } else {
            begin[nx] = begin[id];
            prev[nx] = p;
            next[p] = nx;
        }
        alive[id] = false;
        coalesce(target);
        if (prev[target] != -1) coalesce(prev[target]);
        work.push_back(target);
    }
    return out;
}

std::vector<UsageInterval> detect_usage(const RateSeries& cleaned,
                                        const DetectionThreshold& threshold,
                                        Sensor sensor,
                                        const DetectorConfig& config) {
    if (!cleaned.cleaned) {
        throw InvariantError("detect_usage requires a cleaned rate series");
    }
    std::vector<UsageInterval> out;
    if (cleaned.degenerate || !threshold.has(sensor)) return out;
    const Hz thr = threshold.at(sensor);
    const auto& pts = cleaned.points;

    // Maximal stretches of above-threshold samples, as [first,last] indices.
    struct Stretch {
        size_t first, last;
    };
    std::vector<Stretch> stretches;
    for (size_t i = 0; i < pts.size();) {
        if (pts[i].rate > thr) {
            size_t j = i;
            while (j + 1 < pts.size() && pts[j + 1].rate > thr) ++j;
            stretches.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }

    const int64_t merge_gap_ns = int64_t(config.merge_gap_ms) * 1'000'000;
    const int64_t min_duration_ns = int64_t(config.min_duration_ms) * 1'000'000;
    size_t i = 0;
    while (i < stretches.size()) {
        size_t j = i;
        while (j + 1 < stretches.size() &&
               pts[stretches[j + 1].first].t_ns - pts[stretches[j].last].t_ns <
                   merge_gap_ns) {
            ++j;
        }
        const int64_t start = pts[stretches[i].first].t_ns;
        const int64_t end = pts[stretches[j].last].t_ns;
        if (end - start >= min_duration_ns) {
            UsageInterval iv;
            iv.sensor = sensor;
            iv.start_ns = start;
            iv.end_ns = end;
            Hz peak = 0.0;
            for (size_t k = i; k <= j; ++k) {
                for (size_t p = stretches[k].first; p <= stretches[k].last; ++p) {
                    peak = std::max(peak, pts[p].rate);
                }
            }
            iv.estimated_rate = peak;
            out.push_back(iv);
        }
        i = j + 1;
    }
    return out;
}

bool UsageReport::any_usage() const {
    return std::any_of(sensors.begin(), sensors.end(),
                       [](const auto& kv) { return kv.second.any_usage(); });
}

bool UsageReport::all_three() const {
    int n = 0;
    for (Sensor s : kAllSensors) {
        auto it = sensors.find(s);
        if (it != sensors.end() && it->second.any_usage()) ++n;
    }
    return n == 3;
}

UsageReport detect_all(const std::map<Sensor, SensorEventTrace>& traces,
                       const DeviceProfile& profile, const DetectorConfig& config) {
    UsageReport report;
    report.device = profile.name();
    report.min_duration_ms = config.min_duration_ms;
    const DetectionThreshold thresholds = thresholds_for(profile);

    for (const auto& [sensor, trace] : traces) {
        if (trace.sensor != sensor) {
            throw InvariantError("trace map key does not match trace sensor");
        }
        if (!profile.has(sensor)) {
            report.notes.push_back(std::string(to_string(sensor)) +
                                   ": not covered by profile '" + profile.name() +
                                   "', skipped");
            continue;
        }
        SensorFinding finding;
        finding.threshold_hz = thresholds.at(sensor);
        RateSeries rates = instant_rates(trace);
        RateSeries cleaned = clean_outliers(rates, config.bucket_hz);
        if (cleaned.degenerate) {
            finding.insufficient = true;
        } else {
            finding.intervals = detect_usage(cleaned, thresholds, sensor, config);
            for (UsageInterval& iv : finding.intervals) {
                iv.classified = classify_rate(profile, sensor, iv.estimated_rate);
            }
        }
        report.sensors[sensor] = std::move(finding);
    }
    report.notes.push_back(
        "delivery at the profiled minimum rate is below the detection threshold "
        "and stays invisible to this method");
    return report;
}

}  // namespace ratewatch
