#pragma once
/**
 * @file service.hpp
 * @brief Playground sessions: apply client messages to a session value and
 *        produce the server reply.
 *
 * `handle_message` is a pure function of (session, message, config).
 * `PlaygroundService` adds the session table: any number of sessions, one
 * writer per session at a time, messages of one session applied in arrival
 * order.
 */

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>

#include "curvesel/geometry.hpp"
#include "curvesel/gesture.hpp"
#include "curvesel/protocol.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/scene.hpp"
#include "curvesel/simulate.hpp"

namespace curvesel {

inline constexpr double kReferenceFingerLength = 0.18;

struct ServiceConfig {
    SceneConfig scene;
    HandPose pose_template{default_pose_template()};
    ForearmFrame forearm;
    double k1{kDefaultGain};
    double length{kDefaultReach};
    std::size_t segments{kDefaultSegments};
    std::size_t slots{kDefaultSlots};
};

struct SessionState {
    std::string session_id;
    Scene scene;
    HandPose pose;
    CurveParams params;
    Paradigm paradigm{Paradigm::BezierCurve};
    SelectionState selection;
    ForearmFrame forearm;
};

inline SessionState create_session(std::string id, std::uint64_t seed, const ServiceConfig& config) {
    SceneConfig sc = config.scene;
    sc.seed = seed;
    SessionState s;
    s.session_id = std::move(id);
    s.scene = generate_scene(sc);
    s.pose = config.pose_template;
    s.params = CurveParams{0.0, config.length, config.k1};
    s.forearm = config.forearm;
    return s;
}

/// Current polyline; kappa is forced to zero under the linear paradigm.
inline Polyline session_polyline(const SessionState& s, const ServiceConfig& config) {
    CurveParams p = s.params;
    if (s.paradigm == Paradigm::LinearRay) {
        p.kappa = 0.0;
    }
    return discretize(build_curve(s.pose, p), config.segments);
}

inline protocol::Frame make_frame(const SessionState& s, const ServiceConfig& config) {
    protocol::Frame f;
    const Polyline line = session_polyline(s, config);
    f.session_id = s.session_id;
    f.kappa = s.paradigm == Paradigm::LinearRay ? 0.0 : s.params.kappa;
    f.curve_samples = line.samples;
    const ProximityResult shown =
        s.selection.phase() == Phase::Locked ? *s.selection.frozen() : rank_objects(line, s.scene.objects, config.slots);
    f.ranked = shown.ranked;
    f.slots = project_to_forearm(shown, s.forearm);
    f.phase = s.selection.phase();
    return f;
}

inline std::pair<SessionState, protocol::ServerMessage> handle_message(SessionState session,
                                                                       const protocol::ClientMessage& msg,
                                                                       const ServiceConfig& config) {
    using namespace protocol;
    return std::visit(
        [&](const auto& m) -> std::pair<SessionState, ServerMessage> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NewSession>) {
                SessionState fresh = create_session(session.session_id, m.seed, config);
                SessionCreated reply{fresh.session_id, fresh.scene};
                return {std::move(fresh), std::move(reply)};
            } else if constexpr (std::is_same_v<T, SetPose>) {
                if (!(m.flexion >= 0.0 && m.flexion <= 1.0)) {
                    return {std::move(session), Error{"bad_message", "flexion must lie in [0, 1]"}};
                }
                if (!(m.length > 0.0) || !std::isfinite(m.length) || !is_finite(m.wrist)) {
                    return {std::move(session), Error{"bad_message", "length must be positive and wrist finite"}};
                }
                curvesel::Frame frame;
                try {
                    frame = orthonormal_frame(m.v_align, m.v_ortho);
                } catch (const std::domain_error& e) {
                    return {std::move(session), Error{"bad_message", e.what()}};
                }
                // The slider value stands for (L_straight - L_bent) / L_straight.
                const FlexionMeasure flex(kReferenceFingerLength, (1.0 - m.flexion) * kReferenceFingerLength);
                session.pose.wrist = m.wrist;
                session.pose.v_align = frame.align;
                session.pose.v_ortho = frame.ortho;
                session.pose.fingertip_extended = m.wrist + kReferenceFingerLength * frame.align;
                session.pose.fingertip_current = m.wrist + flex.l_bent() * frame.align;
                session.params.length = m.length;
                session.params.kappa = curvature_from_flexion(flex, session.params.k1);
                protocol::Frame reply = make_frame(session, config);
                return {std::move(session), std::move(reply)};
            } else if constexpr (std::is_same_v<T, Event>) {
                const ProximityResult live =
                    rank_objects(session_polyline(session, config), session.scene.objects, config.slots);
                StepResult step = step_state(session.selection, m.event, live);
                session.selection = std::move(step.state);
                EventResult reply;
                reply.session_id = session.session_id;
                reply.phase = session.selection.phase();
                if (step.outcome) {
                    reply.selection = Selection{*step.outcome, *step.outcome == session.scene.target_id};
                }
                reply.soft_error = step.soft_error;
                reply.frame = make_frame(session, config);
                return {std::move(session), std::move(reply)};
            } else {
                session.paradigm = m.paradigm;
                protocol::Frame reply = make_frame(session, config);
                return {std::move(session), std::move(reply)};
            }
        },
        msg);
}

/// Session table behind the WebSocket endpoint.
class PlaygroundService {
public:
    explicit PlaygroundService(ServiceConfig config = {}) : config_(std::move(config)) {}

    const ServiceConfig& config() const { return config_; }

    /// One text frame in, one text frame out.
    std::string handle_text(const std::string& text) { return protocol::serialize(handle(text)); }

    protocol::ServerMessage handle(const std::string& text) {
        protocol::ClientMessage msg;
        try {
            msg = protocol::parse_client(text);
        } catch (const protocol::ProtocolError& e) {
            return protocol::Error{e.code(), e.what()};
        }
        return handle(msg);
    }

    protocol::ServerMessage handle(const protocol::ClientMessage& msg) {
        try {
            if (const auto* ns = std::get_if<protocol::NewSession>(&msg)) {
                auto slot = std::make_shared<Slot>();
                slot->state.session_id = "s" + std::to_string(++counter_);
                std::lock_guard slot_lock(slot->mutex);
                auto [state, reply] = handle_message(slot->state, *ns, config_);
                slot->state = std::move(state);
                {
                    std::unique_lock table_lock(table_mutex_);
                    sessions_.emplace(slot->state.session_id, slot);
                }
                return reply;
            }
            const std::string id = std::visit(
                [](const auto& m) -> std::string {
                    if constexpr (requires { m.session_id; }) {
                        return m.session_id;
                    } else {
                        return {};
                    }
                },
                msg);
            std::shared_ptr<Slot> slot;
            {
                std::shared_lock table_lock(table_mutex_);
                if (const auto it = sessions_.find(id); it != sessions_.end()) {
                    slot = it->second;
                }
            }
            if (!slot) {
                return protocol::Error{"no_session", "unknown session " + id};
            }
            std::lock_guard slot_lock(slot->mutex);
            auto [state, reply] = handle_message(slot->state, msg, config_);
            slot->state = std::move(state);
            return reply;
        } catch (const std::exception& e) {
            return protocol::Error{"bad_message", e.what()};
        }
    }

    std::size_t session_count() const {
        std::shared_lock lock(table_mutex_);
        return sessions_.size();
    }

    std::optional<SessionState> snapshot(const std::string& id) const {
        std::shared_ptr<Slot> slot;
        {
            std::shared_lock lock(table_mutex_);
            const auto it = sessions_.find(id);
            if (it == sessions_.end()) {
                return std::nullopt;
            }
            slot = it->second;
        }
        std::lock_guard slot_lock(slot->mutex);
        return slot->state;
    }

    void close_all() {
        std::unique_lock lock(table_mutex_);
        sessions_.clear();
    }

private:
    struct Slot {
        std::mutex mutex;
        SessionState state;
    };

    ServiceConfig config_;
    mutable std::shared_mutex table_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::atomic<std::uint64_t> counter_{0};
};

inline ServiceConfig service_config_from(const BlockConfig& b) {
    ServiceConfig c;
    c.scene = b.scene;
    c.pose_template = b.pose_template;
    c.forearm = b.forearm;
    c.k1 = b.settings.k1;
    c.length = b.settings.length;
    c.segments = b.settings.segments;
    c.slots = b.settings.slots;
    return c;
}

}  // namespace curvesel
