#pragma once
// Latency and discretization-error measurements behind `curvesel bench`.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "curvesel/geometry.hpp"
#include "curvesel/gesture.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/rng.hpp"
#include "curvesel/scene.hpp"

namespace curvesel {

struct LatencyStats {
    std::size_t objects{0};
    std::size_t repetitions{0};
    double median_us{0.0};  ///< wall clock
    double p99_us{0.0};     ///< wall clock
};

struct DeviationRow {
    std::size_t segments{0};
    double max_deviation{0.0};      ///< over all sampled curves
    double max_bound{0.0};          ///< largest chord_error_bound over the same curves
    double worst_bound_usage{0.0};  ///< max over curves of deviation / bound
    bool within_bound{true};
};

struct BenchReport {
    std::vector<LatencyStats> latency;
    std::vector<DeviationRow> deviation;
};

inline QuadBezier random_bench_curve(Rng& rng, double half_extent = 2.0) {
    const auto point = [&] {
        return Vec3{rng.uniform(-half_extent, half_extent), rng.uniform(-half_extent, half_extent),
                    rng.uniform(-half_extent, half_extent)};
    };
    QuadBezier c;
    c.p0 = point();
    c.p1 = point();
    c.p2 = point();
    return c;
}

/// Largest distance from the curve to its n-chord polyline, sampled at
/// `samples` uniform parameter values.
inline double max_curve_deviation(const QuadBezier& curve, std::size_t n, std::size_t samples) {
    const Polyline line = discretize(curve, n);
    double worst = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples);
        worst = std::max(worst, min_distance_to_polyline(evaluate_bezier(curve, t), line).d_min);
    }
    return worst;
}

inline LatencyStats measure_rank_latency(const Polyline& line, const std::vector<SceneObject>& objects,
                                         std::size_t repetitions) {
    using clock = std::chrono::steady_clock;
    std::vector<double> us;
    us.reserve(repetitions);
    volatile std::size_t sink = 0;
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto t0 = clock::now();
        const ProximityResult res = rank_objects(line, objects, kDefaultSlots);
        const auto t1 = clock::now();
        sink = sink + res.ranked.size();
        us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    std::sort(us.begin(), us.end());
    LatencyStats s;
    s.objects = objects.size();
    s.repetitions = repetitions;
    s.median_us = us[us.size() / 2];
    s.p99_us = us[std::min(us.size() - 1, (us.size() * 99) / 100)];
    return s;
}

/// Uniform object cloud without the non-overlap constraint; used for load.
inline std::vector<SceneObject> random_objects(std::size_t count, std::uint64_t seed, const SceneConfig& box = {}) {
    Rng rng(seed);
    std::vector<SceneObject> objs;
    objs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec3 p{box.center.x + rng.uniform(-0.5, 0.5) * box.bounds.width_x,
                     box.center.y + rng.uniform(-0.5, 0.5) * box.bounds.height_y,
                     box.center.z + rng.uniform(-0.5, 0.5) * box.bounds.depth_z};
        objs.push_back({static_cast<ObjectId>(i), p, box.object_radius, icon_label(i)});
    }
    return objs;
}

struct BenchOptions {
    std::uint64_t seed{1};
    std::size_t curves{100};
    std::size_t dense_samples{8000};
    std::vector<std::size_t> segment_counts{5, 10, 20, 40, 80};
    std::size_t small_repetitions{2000};
    std::size_t large_repetitions{50};
};

inline BenchReport run_bench(const BenchOptions& opt = {}) {
    BenchReport report;

    HandPose pose;
    pose.wrist = {0.15, 1.1, 0.2};
    const Polyline line = discretize(build_curve(pose, CurveParams{0.75, kDefaultReach, kDefaultGain}));
    SceneConfig sc;
    sc.seed = opt.seed;
    report.latency.push_back(measure_rank_latency(line, generate_scene(sc).objects, opt.small_repetitions));
    report.latency.push_back(measure_rank_latency(line, random_objects(10000, opt.seed), opt.large_repetitions));

    Rng rng(derive_seed(opt.seed, {0xBE4C}));
    std::vector<QuadBezier> curves;
    for (std::size_t i = 0; i < opt.curves; ++i) {
        curves.push_back(random_bench_curve(rng));
    }
    for (const std::size_t n : opt.segment_counts) {
        DeviationRow row;
        row.segments = n;
        for (const auto& c : curves) {
            const double dev = max_curve_deviation(c, n, opt.dense_samples);
            const double bound = chord_error_bound(c, n);
            row.max_deviation = std::max(row.max_deviation, dev);
            row.max_bound = std::max(row.max_bound, bound);
            if (bound > 0.0) {
                row.worst_bound_usage = std::max(row.worst_bound_usage, dev / bound);
            }
            row.within_bound = row.within_bound && dev <= bound + 1e-12;
        }
        report.deviation.push_back(row);
    }
    return report;
}

}  // namespace curvesel
