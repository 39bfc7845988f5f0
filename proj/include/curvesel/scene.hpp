#pragma once
/**
 * @file scene.hpp
 * @brief Seeded study scenes and line-of-sight occlusion statistics.
 *
 * A scene is `object_count` non-overlapping spheres whose centers are drawn
 * uniformly inside an axis-aligned box, plus one target picked from the same
 * random stream. Identical configs give bit-identical scenes.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvesel/geometry.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/rng.hpp"
#include "curvesel/vec3.hpp"

namespace curvesel {

/// A config value failed validation; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)), message_(message) {}

    const std::string& field() const { return field_; }
    const std::string& message() const { return message_; }

private:
    std::string field_;
    std::string message_;
};

class InfeasibleSceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kPlacementAttempts = 10000;

struct BoxExtents {
    double width_x{3.0};
    double height_y{1.5};
    double depth_z{1.5};

    friend bool operator==(const BoxExtents&, const BoxExtents&) = default;
};

struct SceneConfig {
    std::size_t object_count{64};
    BoxExtents bounds;
    Vec3 center{0.0, 1.4, 2.5};
    double object_radius{kDefaultObjectRadius};
    std::uint64_t seed{1};

    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

inline void validate(const SceneConfig& c) {
    if (c.object_count < 1) {
        throw ConfigError("object_count", "must be at least 1");
    }
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(c.bounds.width_x)) {
        throw ConfigError("bounds.width_x", "must be positive");
    }
    if (!positive(c.bounds.height_y)) {
        throw ConfigError("bounds.height_y", "must be positive");
    }
    if (!positive(c.bounds.depth_z)) {
        throw ConfigError("bounds.depth_z", "must be positive");
    }
    if (!is_finite(c.center)) {
        throw ConfigError("center", "must be finite");
    }
    if (!positive(c.object_radius)) {
        throw ConfigError("object_radius", "must be positive");
    }
}

struct Scene {
    std::vector<SceneObject> objects;
    ObjectId target_id{0};
    SceneConfig config;

    const SceneObject& object(ObjectId id) const {
        for (const auto& o : objects) {
            if (o.id == id) {
                return o;
            }
        }
        throw std::out_of_range("scene has no object " + std::to_string(id));
    }
    const SceneObject& target() const { return object(target_id); }

    friend bool operator==(const Scene&, const Scene&) = default;
};

inline bool inside_bounds(const SceneConfig& c, const Vec3& p) {
    const Vec3 d = p - c.center;
    return std::abs(d.x) <= 0.5 * c.bounds.width_x && std::abs(d.y) <= 0.5 * c.bounds.height_y &&
           std::abs(d.z) <= 0.5 * c.bounds.depth_z;
}

inline std::string icon_label(std::size_t i) {
    static constexpr std::array<const char*, 8> colors{"red", "orange", "yellow", "green",
                                                       "cyan", "blue", "purple", "gray"};
    static constexpr std::array<const char*, 8> shapes{"star", "heart", "circle", "square",
                                                       "triangle", "diamond", "cross", "moon"};
    return std::string(colors[i % colors.size()]) + "-" + shapes[(i / colors.size()) % shapes.size()];
}

inline Scene generate_scene(const SceneConfig& config) {
    validate(config);
    Rng rng(config.seed);
    Scene scene;
    scene.config = config;
    scene.objects.reserve(config.object_count);
    const double min_gap2 = 4.0 * config.object_radius * config.object_radius;
    const Vec3 half{0.5 * config.bounds.width_x, 0.5 * config.bounds.height_y, 0.5 * config.bounds.depth_z};

    for (std::size_t i = 0; i < config.object_count; ++i) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
            const Vec3 p{config.center.x + rng.uniform(-half.x, half.x), config.center.y + rng.uniform(-half.y, half.y),
                         config.center.z + rng.uniform(-half.z, half.z)};
            bool clear = true;
            for (const auto& o : scene.objects) {
                if (squared_norm(o.position - p) < min_gap2) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                scene.objects.push_back({static_cast<ObjectId>(i), p, config.object_radius, icon_label(i)});
                placed = true;
            }
        }
        if (!placed) {
            throw InfeasibleSceneError("cannot place object " + std::to_string(i) + " without overlap after " +
                                       std::to_string(kPlacementAttempts) + " attempts");
        }
    }
    scene.target_id = scene.objects[rng.index(scene.objects.size())].id;
    return scene;
}

inline constexpr double kDefaultOcclusionCone = 0.5 * std::numbers::pi / 180.0;

/// Objects whose line of sight from `eye` is blocked: another sphere crosses
/// the eye-to-center segment, or another center sits nearer within the cone.
inline std::set<ObjectId> occlusion_set(const Scene& scene, const Vec3& eye,
                                        double cone_half_angle = kDefaultOcclusionCone) {
    for (const auto& o : scene.objects) {
        if (distance(o.position, eye) <= o.radius) {
            throw std::domain_error("occlusion_set: eye lies inside object " + std::to_string(o.id));
        }
    }
    const double cos_cone = std::cos(cone_half_angle);
    std::set<ObjectId> occluded;
    for (const auto& target : scene.objects) {
        const Vec3 sight = target.position - eye;
        const double depth = norm(sight);
        const Vec3 u = sight / depth;
        for (const auto& other : scene.objects) {
            if (other.id == target.id) {
                continue;
            }
            if (project_point_to_segment(other.position, eye, target.position).distance <= other.radius) {
                occluded.insert(target.id);
                break;
            }
            const Vec3 to_other = other.position - eye;
            const double along = dot(to_other, u);
            if (along > 0.0 && along < depth && along >= cos_cone * norm(to_other)) {
                occluded.insert(target.id);
                break;
            }
        }
    }
    return occluded;
}

}  // namespace curvesel
