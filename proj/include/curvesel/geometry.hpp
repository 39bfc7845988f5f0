#pragma once
/**
 * @file geometry.hpp
 * @brief Quadratic Bezier evaluation, chord discretization and
 *        point-to-polyline distance queries.
 *
 * Every function here is pure and safe to call concurrently.
 *
 * Conventions:
 *   - Curves are bounded: t outside [0, 1] is rejected, never extrapolated.
 *   - Segment projections clamp the line parameter to [0, 1], so a point past
 *     the ray tip measures its distance to the tip.
 *   - Zero-length segments (|b - a| < kDegenerateSegment) report the distance
 *     to `a` with lambda = 0.
 */

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "curvesel/vec3.hpp"

namespace curvesel {

inline constexpr std::size_t kDefaultSegments = 20;
inline constexpr double kDegenerateSegment = 1e-12;

struct QuadBezier {
    Vec3 p0;  ///< start point (wrist)
    Vec3 p1;  ///< control point
    Vec3 p2;  ///< end point

    friend bool operator==(const QuadBezier&, const QuadBezier&) = default;
};

inline void require_valid(const QuadBezier& c) {
    require_finite(c.p0, "QuadBezier.p0");
    require_finite(c.p1, "QuadBezier.p1");
    require_finite(c.p2, "QuadBezier.p2");
}

/// n chords between the samples B(i/n), i = 0..n.
struct Polyline {
    std::vector<Vec3> samples;

    std::size_t segments() const { return samples.empty() ? 0 : samples.size() - 1; }
};

struct SegmentProjection {
    double lambda{0.0};  ///< clamped to [0, 1]
    Vec3 point;
    double distance{0.0};
};

struct PolylineDistance {
    double d_min{std::numeric_limits<double>::infinity()};
    SegmentProjection best;
    std::size_t segment_index{0};
};

/// (1-t)^2 p0 + 2(1-t)t p1 + t^2 p2 for t in [0, 1].
inline Vec3 evaluate_bezier(const QuadBezier& curve, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::domain_error("evaluate_bezier: t must lie in [0, 1]");
    }
    require_valid(curve);
    const double s = 1.0 - t;
    return (s * s) * curve.p0 + (2.0 * s * t) * curve.p1 + (t * t) * curve.p2;
}

inline Polyline discretize(const QuadBezier& curve, std::size_t n = kDefaultSegments) {
    if (n == 0) {
        throw std::domain_error("discretize: segment count must be positive");
    }
    Polyline line;
    line.samples.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        // i == n maps to exactly 1.0, so the last sample is p2
        line.samples.push_back(evaluate_bezier(curve, static_cast<double>(i) / static_cast<double>(n)));
    }
    return line;
}

inline SegmentProjection project_point_to_segment(const Vec3& o, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = squared_norm(ab);
    if (len2 < kDegenerateSegment * kDegenerateSegment) {
        return {0.0, a, distance(o, a)};
    }
    double lambda = dot(o - a, ab) / len2;
    if (lambda < 0.0) {
        lambda = 0.0;
    } else if (lambda > 1.0) {
        lambda = 1.0;
    }
    SegmentProjection p;
    p.lambda = lambda;
    p.point = a + lambda * ab;
    p.distance = distance(o, p.point);
    return p;
}

/// Smallest segment distance; ties go to the lowest segment index.
inline PolylineDistance min_distance_to_polyline(const Vec3& o, const Polyline& line) {
    if (line.segments() == 0) {
        throw std::domain_error("min_distance_to_polyline: polyline has no segments");
    }
    require_finite(o, "min_distance_to_polyline");
    PolylineDistance result;
    const auto& s = line.samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const SegmentProjection p = project_point_to_segment(o, s[i], s[i + 1]);
        if (p.distance < result.d_min) {
            result.d_min = p.distance;
            result.best = p;
            result.segment_index = i;
        }
    }
    return result;
}

/// Upper bound on curve-to-polyline deviation for n uniform chords:
/// |p0 - 2 p1 + p2| / (4 n^2). Exact at the midpoint of every chord.
inline double chord_error_bound(const QuadBezier& curve, std::size_t n = kDefaultSegments) {
    if (n == 0) {
        throw std::domain_error("chord_error_bound: segment count must be positive");
    }
    const double nn = static_cast<double>(n);
    return norm(curve.p0 - 2.0 * curve.p1 + curve.p2) / (4.0 * nn * nn);
}

}  // namespace curvesel
