#pragma once
/**
 * @file proximity.hpp
 * @brief Proximity matching against the discretized ray, forearm slot
 *        layout, and the activate / lock / confirm state machine.
 *
 * Objects are bounding spheres. An object's d_min is the distance from its
 * center to the polyline minus its radius, floored at 0, so a pierced object
 * reads 0. Rankings order by (d_min, id).
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "curvesel/geometry.hpp"
#include "curvesel/vec3.hpp"

namespace curvesel {

using ObjectId = std::uint32_t;

inline constexpr std::size_t kDefaultSlots = 4;
inline constexpr double kDefaultObjectRadius = 0.06;

struct SceneObject {
    ObjectId id{0};
    Vec3 position;
    double radius{kDefaultObjectRadius};
    std::string label;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct RankedEntry {
    ObjectId object_id{0};
    double d_min{0.0};
    Vec3 projection;
    std::size_t segment_index{0};
    double lambda{0.0};

    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct ProximityResult {
    std::vector<RankedEntry> ranked;
    std::size_t k{kDefaultSlots};

    friend bool operator==(const ProximityResult&, const ProximityResult&) = default;
};

/// Surface distance of one object to the polyline, with the winning segment.
inline RankedEntry measure_object(const Polyline& line, const SceneObject& obj) {
    const PolylineDistance d = min_distance_to_polyline(obj.position, line);
    return {obj.id, std::max(0.0, d.d_min - obj.radius), d.best.point, d.segment_index, d.best.lambda};
}

inline bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
    return std::tie(a.d_min, a.object_id) < std::tie(b.d_min, b.object_id);
}

inline ProximityResult rank_objects(const Polyline& line, const std::vector<SceneObject>& objects,
                                    std::size_t k = kDefaultSlots) {
    if (k == 0) {
        throw std::domain_error("rank_objects: k must be positive");
    }
    ProximityResult result;
    result.k = k;
    if (objects.empty()) {
        return result;
    }
    std::vector<RankedEntry> all;
    all.reserve(objects.size());
    for (const auto& obj : objects) {
        all.push_back(measure_object(line, obj));
    }
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    result.ranked = std::move(all);
    return result;
}

/// First object pierced along the ray: smallest winning (segment, lambda)
/// among objects with d_min == 0; ties by id.
inline std::optional<ObjectId> ray_hit_select(const Polyline& line, const std::vector<SceneObject>& objects) {
    std::optional<RankedEntry> best;
    for (const auto& obj : objects) {
        const RankedEntry e = measure_object(line, obj);
        if (e.d_min > 0.0) {
            continue;
        }
        if (!best || std::tie(e.segment_index, e.lambda, e.object_id) <
                         std::tie(best->segment_index, best->lambda, best->object_id)) {
            best = e;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return best->object_id;
}

// ---------------------------------------------------------------------------
// Forearm layout

struct ForearmFrame {
    Vec3 elbow{0.15, 1.05, -0.06};
    Vec3 wrist{0.15, 1.10, 0.20};
    std::vector<double> slot_fractions{0.8, 0.6, 0.4, 0.2};
};

inline void require_valid(const ForearmFrame& f) {
    require_finite(f.elbow, "ForearmFrame.elbow");
    require_finite(f.wrist, "ForearmFrame.wrist");
    if (!(distance(f.elbow, f.wrist) > 0.0)) {
        throw std::domain_error("ForearmFrame: elbow and wrist coincide");
    }
    for (std::size_t i = 0; i < f.slot_fractions.size(); ++i) {
        const double s = f.slot_fractions[i];
        if (!(s > 0.0 && s < 1.0)) {
            throw std::domain_error("ForearmFrame: slot fractions must lie in (0, 1)");
        }
        if (i > 0 && !(s < f.slot_fractions[i - 1])) {
            throw std::domain_error("ForearmFrame: slot fractions must be strictly decreasing");
        }
    }
}

struct SlotAssignment {
    std::size_t slot_index{0};
    ObjectId object_id{0};
    Vec3 slot_center;

    friend bool operator==(const SlotAssignment&, const SlotAssignment&) = default;
};

/// Rank i goes to slot i; slot 0 sits nearest the wrist.
inline std::vector<SlotAssignment> project_to_forearm(const ProximityResult& result, const ForearmFrame& frame) {
    require_valid(frame);
    if (result.ranked.size() > frame.slot_fractions.size()) {
        throw std::domain_error("project_to_forearm: more ranked entries than forearm slots");
    }
    std::vector<SlotAssignment> slots;
    slots.reserve(result.ranked.size());
    const Vec3 axis = frame.wrist - frame.elbow;
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        slots.push_back({i, result.ranked[i].object_id, frame.elbow + frame.slot_fractions[i] * axis});
    }
    return slots;
}

// ---------------------------------------------------------------------------
// Selection state machine

enum class Phase { Idle, Active, Locked };

enum class EventKind { MiddleFingerBent, MiddleFingerStraightened, SlotTouched, Cancel };

struct SelectionEvent {
    EventKind kind{EventKind::Cancel};
    std::size_t slot_index{0};  ///< meaningful only for SlotTouched

    static SelectionEvent bend() { return {EventKind::MiddleFingerBent, 0}; }
    static SelectionEvent straighten() { return {EventKind::MiddleFingerStraightened, 0}; }
    static SelectionEvent touch(std::size_t slot) { return {EventKind::SlotTouched, slot}; }
    static SelectionEvent cancel() { return {EventKind::Cancel, 0}; }

    friend bool operator==(const SelectionEvent&, const SelectionEvent&) = default;
};

/// `frozen` is engaged exactly when phase == Locked; the factories below are
/// the only way to produce a state.
class SelectionState {
public:
    SelectionState() = default;

    static SelectionState idle() { return {}; }
    static SelectionState active() { return SelectionState(Phase::Active, std::nullopt); }
    static SelectionState locked(ProximityResult snapshot) { return SelectionState(Phase::Locked, std::move(snapshot)); }

    Phase phase() const { return phase_; }
    const std::optional<ProximityResult>& frozen() const { return frozen_; }

    bool invariant_holds() const { return frozen_.has_value() == (phase_ == Phase::Locked); }

    friend bool operator==(const SelectionState&, const SelectionState&) = default;

private:
    SelectionState(Phase p, std::optional<ProximityResult> f) : phase_(p), frozen_(std::move(f)) {}

    Phase phase_{Phase::Idle};
    std::optional<ProximityResult> frozen_;
};

struct StepResult {
    SelectionState state;
    std::optional<ObjectId> outcome;
    std::optional<std::string> soft_error;
};

inline StepResult step_state(const SelectionState& state, const SelectionEvent& event, const ProximityResult& live) {
    if (event.kind == EventKind::Cancel) {
        return {SelectionState::idle(), std::nullopt, std::nullopt};
    }
    switch (state.phase()) {
        case Phase::Idle:
            if (event.kind == EventKind::MiddleFingerBent) {
                return {SelectionState::active(), std::nullopt, std::nullopt};
            }
            break;
        case Phase::Active:
            if (event.kind == EventKind::MiddleFingerStraightened) {
                return {SelectionState::locked(live), std::nullopt, std::nullopt};
            }
            break;
        case Phase::Locked:
            if (event.kind == EventKind::SlotTouched) {
                const auto& ranked = state.frozen()->ranked;
                if (event.slot_index >= ranked.size()) {
                    return {state, std::nullopt, std::string("empty slot")};
                }
                return {SelectionState::idle(), ranked[event.slot_index].object_id, std::nullopt};
            }
            break;
    }
    return {state, std::nullopt, std::nullopt};
}

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::Idle:
            return "idle";
        case Phase::Active:
            return "active";
        case Phase::Locked:
            return "locked";
    }
    return "idle";
}

}  // namespace curvesel
