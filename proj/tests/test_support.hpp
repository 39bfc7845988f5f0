#pragma once
// Independent oracles and fixtures shared by the unit and acceptance suites.
// Nothing here calls the routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "curvesel/geometry.hpp"
#include "curvesel/gesture.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/rng.hpp"
#include "curvesel/scene.hpp"
#include "curvesel/simulate.hpp"

namespace curvesel::testing {

inline Vec3 random_point(Rng& rng, double h) {
    return {rng.uniform(-h, h), rng.uniform(-h, h), rng.uniform(-h, h)};
}

inline QuadBezier random_curve(Rng& rng, double h = 2.0) {
    return {random_point(rng, h), random_point(rng, h), random_point(rng, h)};
}

/// Bernstein form written out per coordinate, no shared code with the library.
inline Vec3 bernstein(const QuadBezier& c, double t) {
    const double b0 = (1 - t) * (1 - t);
    const double b1 = 2 * (1 - t) * t;
    const double b2 = t * t;
    return {b0 * c.p0.x + b1 * c.p1.x + b2 * c.p2.x, b0 * c.p0.y + b1 * c.p1.y + b2 * c.p2.y,
            b0 * c.p0.z + b1 * c.p1.z + b2 * c.p2.z};
}

/// min over `samples`+1 uniform t of |o - B(t)|.
inline double dense_curve_distance(const QuadBezier& c, const Vec3& o, std::size_t samples = 100000) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= samples; ++i) {
        const Vec3 p = bernstein(c, static_cast<double>(i) / static_cast<double>(samples));
        const double dx = p.x - o.x, dy = p.y - o.y, dz = p.z - o.z;
        best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    return std::sqrt(best);
}

/// Segment distance by minimizing the quadratic |a + s(b - a) - o|^2 over s
/// in [0, 1]: candidates are both endpoints and the stationary point.
inline double segment_distance_oracle(const Vec3& o, const Vec3& a, const Vec3& b) {
    const auto dist2 = [&](double s) {
        const double x = a.x + s * (b.x - a.x) - o.x;
        const double y = a.y + s * (b.y - a.y) - o.y;
        const double z = a.z + s * (b.z - a.z) - o.z;
        return x * x + y * y + z * z;
    };
    double best = std::min(dist2(0.0), dist2(1.0));
    const double qa = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) + (b.z - a.z) * (b.z - a.z);
    if (qa > 0.0) {
        const double qb = (b.x - a.x) * (a.x - o.x) + (b.y - a.y) * (a.y - o.y) + (b.z - a.z) * (a.z - o.z);
        const double s = -qb / qa;
        if (s > 0.0 && s < 1.0) {
            best = std::min(best, dist2(s));
        }
    }
    return std::sqrt(best);
}

struct BruteForceHit {
    double d_min{std::numeric_limits<double>::infinity()};
    std::size_t segment_index{0};
};

inline BruteForceHit brute_force_polyline(const Vec3& o, const std::vector<Vec3>& samples) {
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        d.push_back(segment_distance_oracle(o, samples[i], samples[i + 1]));
    }
    const auto it = std::min_element(d.begin(), d.end());
    return {*it, static_cast<std::size_t>(it - d.begin())};
}

/// Full (d_min, id) sort of every object, d_min from the oracle above.
inline std::vector<std::pair<double, ObjectId>> brute_force_ranking(const std::vector<Vec3>& samples,
                                                                    const std::vector<SceneObject>& objects) {
    std::vector<std::pair<double, ObjectId>> all;
    for (const auto& o : objects) {
        const double center = brute_force_polyline(o.position, samples).d_min;
        all.emplace_back(std::max(0.0, center - o.radius), o.id);
    }
    std::sort(all.begin(), all.end());
    return all;
}

/// Ray-sphere intersection along eye -> target solved as a quadratic in s.
inline bool segment_hits_sphere(const Vec3& eye, const Vec3& end, const Vec3& c, double r) {
    const Vec3 d = end - eye;
    const Vec3 f = eye - c;
    const double qa = dot(d, d);
    const double qb = 2.0 * dot(f, d);
    const double qc = dot(f, f) - r * r;
    if (qc <= 0.0) {
        return true;  // segment starts inside
    }
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) {
        return false;
    }
    const double s1 = (-qb - std::sqrt(disc)) / (2.0 * qa);
    const double s2 = (-qb + std::sqrt(disc)) / (2.0 * qa);
    return (s1 >= 0.0 && s1 <= 1.0) || (s2 >= 0.0 && s2 <= 1.0) || (s1 < 0.0 && s2 > 1.0);
}

inline std::set<ObjectId> brute_force_occlusion(const Scene& scene, const Vec3& eye, double cone) {
    std::set<ObjectId> out;
    for (const auto& t : scene.objects) {
        const double depth = distance(t.position, eye);
        for (const auto& o : scene.objects) {
            if (o.id == t.id) {
                continue;
            }
            const double angle =
                std::acos(std::clamp(dot(o.position - eye, t.position - eye) / (distance(o.position, eye) * depth),
                                     -1.0, 1.0));
            const double along = distance(o.position, eye) * std::cos(angle);
            if (segment_hits_sphere(eye, t.position, o.position, o.radius) ||
                (angle <= cone && along > 0.0 && along < depth)) {
                out.insert(t.id);
                break;
            }
        }
    }
    return out;
}

inline HandPose random_pose(Rng& rng) {
    const Vec3 a = normalized(random_point(rng, 1.0) + Vec3{0.0, 0.0, 1e-3});
    Vec3 helper = random_point(rng, 1.0);
    Vec3 o = normalized(helper - dot(helper, a) * a);
    HandPose p;
    p.wrist = random_point(rng, 1.0);
    p.v_align = a;
    p.v_ortho = o;
    p.fingertip_extended = p.wrist + 0.18 * a;
    p.fingertip_current = p.fingertip_extended;
    return p;
}

// ---------------------------------------------------------------------------
// Occluded-target scene family: a target in the study volume and a blocker
// sphere centered on the straight wrist -> target line.

inline constexpr double kBlockerFractionLo = 0.3;
inline constexpr double kBlockerFractionHi = 0.8;

inline Scene occlusion_scene(std::uint64_t seed, const Vec3& wrist = default_pose_template().wrist) {
    Rng rng(derive_seed(seed, {0xA5}));
    SceneConfig cfg;
    cfg.seed = seed;
    cfg.object_count = 2;
    const Vec3 target{cfg.center.x + rng.uniform(-0.5, 0.5) * cfg.bounds.width_x,
                      cfg.center.y + rng.uniform(-0.5, 0.5) * cfg.bounds.height_y,
                      cfg.center.z + rng.uniform(-0.5, 0.5) * cfg.bounds.depth_z};
    const double f = rng.uniform(kBlockerFractionLo, kBlockerFractionHi);
    const Vec3 blocker = wrist + f * (target - wrist);
    Scene s;
    s.config = cfg;
    // blocker gets the lower id so id tie-breaks never favour the target
    s.objects.push_back({0, blocker, cfg.object_radius, "blocker"});
    s.objects.push_back({1, target, cfg.object_radius, "target"});
    s.target_id = 1;
    return s;
}

}  // namespace curvesel::testing
