#pragma once
/**
 * @file gesture.hpp
 * @brief Hand pose to selection curve.
 *
 * Finger flexion shortens the wrist-to-fingertip distance. The relative
 * shortening, scaled by the gain k1, is the curvature parameter kappa, which
 * places the control point and the end point of the quadratic ray in the
 * forearm frame (v_align along the forearm, v_ortho normal to the hand).
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvesel/geometry.hpp"
#include "curvesel/vec3.hpp"

namespace curvesel {

inline constexpr double kDefaultGain = 1.5;
inline constexpr double kDefaultReach = 4.0;
inline constexpr double kFrameTolerance = 1e-6;

struct HandPose {
    Vec3 wrist;
    Vec3 fingertip_extended;  ///< fingertip with the finger fully extended
    Vec3 fingertip_current;
    Vec3 v_align{0.0, 0.0, 1.0};
    Vec3 v_ortho{0.0, 1.0, 0.0};
};

struct CurveParams {
    double kappa{0.0};
    double length{kDefaultReach};
    double k1{kDefaultGain};
};

/// Wrist-to-fingertip lengths. The bent length is clamped into
/// [0, l_straight] so tracking jitter past full extension yields kappa = 0.
class FlexionMeasure {
public:
    FlexionMeasure(double l_straight, double l_bent)
        : l_straight_(l_straight), l_bent_(std::clamp(l_bent, 0.0, std::max(l_straight, 0.0))) {
        require_finite(l_straight, "FlexionMeasure.l_straight");
        require_finite(l_bent, "FlexionMeasure.l_bent");
    }

    double l_straight() const { return l_straight_; }
    double l_bent() const { return l_bent_; }

private:
    double l_straight_;
    double l_bent_;
};

inline double straight_length(const Vec3& wrist, const Vec3& fingertip) {
    require_finite(wrist, "straight_length.wrist");
    require_finite(fingertip, "straight_length.fingertip");
    return distance(wrist, fingertip);
}

inline double curvature_from_flexion(const FlexionMeasure& m, double k1 = kDefaultGain) {
    if (!(m.l_straight() > 0.0)) {
        throw std::domain_error("curvature_from_flexion: l_straight must be positive");
    }
    if (!(k1 > 0.0) || !std::isfinite(k1)) {
        throw std::domain_error("curvature_from_flexion: k1 must be positive");
    }
    return k1 * ((m.l_straight() - m.l_bent()) / m.l_straight());
}

inline FlexionMeasure flexion_of(const HandPose& pose) {
    return FlexionMeasure(straight_length(pose.wrist, pose.fingertip_extended),
                          straight_length(pose.wrist, pose.fingertip_current));
}

struct Frame {
    Vec3 align;
    Vec3 ortho;
};

/// Validates the pose frame against kFrameTolerance and returns it
/// re-orthonormalized (Gram-Schmidt of v_ortho against v_align).
inline Frame orthonormal_frame(const Vec3& v_align, const Vec3& v_ortho) {
    require_finite(v_align, "HandPose.v_align");
    require_finite(v_ortho, "HandPose.v_ortho");
    if (std::abs(norm(v_align) - 1.0) > kFrameTolerance || std::abs(norm(v_ortho) - 1.0) > kFrameTolerance ||
        std::abs(dot(v_align, v_ortho)) > kFrameTolerance) {
        throw std::domain_error("hand frame is not orthonormal");
    }
    const Vec3 a = normalized(v_align);
    const Vec3 o = normalized(v_ortho - dot(v_ortho, a) * a);
    return {a, o};
}

inline QuadBezier build_curve(const HandPose& pose, const CurveParams& params) {
    require_finite(pose.wrist, "HandPose.wrist");
    if (!(params.length > 0.0) || !std::isfinite(params.length)) {
        throw std::domain_error("build_curve: length must be positive");
    }
    if (!(params.kappa >= 0.0) || !std::isfinite(params.kappa)) {
        throw std::domain_error("build_curve: kappa must be non-negative");
    }
    const Frame f = orthonormal_frame(pose.v_align, pose.v_ortho);
    const double k = params.kappa;
    const double l = params.length;
    QuadBezier c;
    c.p0 = pose.wrist;
    c.p1 = c.p0 + f.align * (0.5 * (1.0 + k) * l);
    c.p2 = c.p0 + l * f.align + (k * l) * f.ortho;
    return c;
}

/// Straight baseline ray; the kappa = 0 case of build_curve.
inline QuadBezier linear_ray(const HandPose& pose, double length = kDefaultReach) {
    return build_curve(pose, CurveParams{0.0, length, kDefaultGain});
}

}  // namespace curvesel
