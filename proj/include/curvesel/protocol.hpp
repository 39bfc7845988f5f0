#pragma once
/**
 * @file protocol.hpp
 * @brief Playground message protocol: typed client/server messages and their
 *        JSON text encoding.
 *
 * Every message is a JSON object with a "type" discriminator. Vectors are
 * 3-element arrays of 64-bit reals. Client messages:
 *
 *   {"type":"new_session","seed":u64}
 *   {"type":"set_pose","session_id":s,"wrist":v,"v_align":v,"v_ortho":v,"flexion":f,"length":l}
 *   {"type":"event","session_id":s,"kind":"bend"|"straighten"|"slot_touched"|"cancel","slot":i}
 *   {"type":"set_paradigm","session_id":s,"paradigm":"linear"|"bezier"}
 *
 * Server messages: "session", "frame", "event_result" and "error"
 * (see the structs below for their fields).
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvesel/io.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/scene.hpp"
#include "curvesel/simulate.hpp"

namespace curvesel::protocol {

using nlohmann::json;

/// Malformed message; `code()` is the wire error code.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string code, const std::string& detail)
        : std::runtime_error(detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// ---------------------------------------------------------------------------
// Client messages

struct NewSession {
    std::uint64_t seed{0};
    friend bool operator==(const NewSession&, const NewSession&) = default;
};

struct SetPose {
    std::string session_id;
    Vec3 wrist;
    Vec3 v_align{0.0, 0.0, 1.0};
    Vec3 v_ortho{0.0, 1.0, 0.0};
    double flexion{0.0};  ///< 0 = extended, 1 = fully bent
    double length{kDefaultReach};
    friend bool operator==(const SetPose&, const SetPose&) = default;
};

struct Event {
    std::string session_id;
    SelectionEvent event;
    friend bool operator==(const Event&, const Event&) = default;
};

struct SetParadigm {
    std::string session_id;
    Paradigm paradigm{Paradigm::BezierCurve};
    friend bool operator==(const SetParadigm&, const SetParadigm&) = default;
};

using ClientMessage = std::variant<NewSession, SetPose, Event, SetParadigm>;

// ---------------------------------------------------------------------------
// Server messages

struct SessionCreated {
    std::string session_id;
    Scene scene;
    friend bool operator==(const SessionCreated&, const SessionCreated&) = default;
};

struct Frame {
    std::string session_id;
    double kappa{0.0};
    std::vector<Vec3> curve_samples;
    std::vector<RankedEntry> ranked;
    std::vector<SlotAssignment> slots;
    Phase phase{Phase::Idle};
    friend bool operator==(const Frame&, const Frame&) = default;
};

struct Selection {
    ObjectId object_id{0};
    bool is_target{false};
    friend bool operator==(const Selection&, const Selection&) = default;
};

struct EventResult {
    std::string session_id;
    Phase phase{Phase::Idle};
    std::optional<Selection> selection;
    std::optional<std::string> soft_error;
    Frame frame;
    friend bool operator==(const EventResult&, const EventResult&) = default;
};

struct Error {
    std::string code;
    std::string detail;
    friend bool operator==(const Error&, const Error&) = default;
};

using ServerMessage = std::variant<SessionCreated, Frame, EventResult, Error>;

// ---------------------------------------------------------------------------
// Field readers; any failure is a bad_message.

namespace detail {

inline const json& field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ProtocolError("bad_message", std::string("missing field ") + key);
    }
    return *it;
}

inline double real(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) {
        throw ProtocolError("bad_message", std::string(key) + " must be a number");
    }
    return v.get<double>();
}

inline std::uint64_t u64(const json& j, const char* key) {
    const json& v = field(j, key);
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ProtocolError("bad_message", std::string(key) + " must be a non-negative integer");
}

inline std::string str(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) {
        throw ProtocolError("bad_message", std::string(key) + " must be a string");
    }
    return v.get<std::string>();
}

inline bool boolean(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_boolean()) {
        throw ProtocolError("bad_message", std::string(key) + " must be a boolean");
    }
    return v.get<bool>();
}

inline Vec3 vec(const json& v, const char* what) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
        throw ProtocolError("bad_message", std::string(what) + " must be a 3-element number array");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Vec3 vec(const json& j, const char* key, int) { return vec(field(j, key), key); }

inline Phase phase(const std::string& s) {
    if (s == "idle") {
        return Phase::Idle;
    }
    if (s == "active") {
        return Phase::Active;
    }
    if (s == "locked") {
        return Phase::Locked;
    }
    throw ProtocolError("bad_message", "unknown phase " + s);
}

}  // namespace detail

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::MiddleFingerBent:
            return "bend";
        case EventKind::MiddleFingerStraightened:
            return "straighten";
        case EventKind::SlotTouched:
            return "slot_touched";
        case EventKind::Cancel:
            return "cancel";
    }
    return "cancel";
}

// ---------------------------------------------------------------------------
// Encoding

inline json to_json(const ClientMessage& msg) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NewSession>) {
                return {{"type", "new_session"}, {"seed", m.seed}};
            } else if constexpr (std::is_same_v<T, SetPose>) {
                return {{"type", "set_pose"},
                        {"session_id", m.session_id},
                        {"wrist", curvesel::to_json(m.wrist)},
                        {"v_align", curvesel::to_json(m.v_align)},
                        {"v_ortho", curvesel::to_json(m.v_ortho)},
                        {"flexion", m.flexion},
                        {"length", m.length}};
            } else if constexpr (std::is_same_v<T, Event>) {
                json j = {{"type", "event"}, {"session_id", m.session_id}, {"kind", event_kind_name(m.event.kind)}};
                if (m.event.kind == EventKind::SlotTouched) {
                    j["slot"] = m.event.slot_index;
                }
                return j;
            } else {
                return {{"type", "set_paradigm"},
                        {"session_id", m.session_id},
                        {"paradigm", m.paradigm == Paradigm::LinearRay ? "linear" : "bezier"}};
            }
        },
        msg);
}

inline json frame_to_json(const Frame& f) {
    json samples = json::array();
    for (const auto& p : f.curve_samples) {
        samples.push_back(curvesel::to_json(p));
    }
    json ranked = json::array();
    for (const auto& e : f.ranked) {
        ranked.push_back({{"object_id", e.object_id},
                          {"d_min", e.d_min},
                          {"projection", curvesel::to_json(e.projection)},
                          {"segment_index", e.segment_index},
                          {"lambda", e.lambda}});
    }
    json slots = json::array();
    for (const auto& s : f.slots) {
        slots.push_back(
            {{"slot_index", s.slot_index}, {"object_id", s.object_id}, {"slot_center", curvesel::to_json(s.slot_center)}});
    }
    return {{"type", "frame"},
            {"session_id", f.session_id},
            {"kappa", f.kappa},
            {"curve_samples", std::move(samples)},
            {"ranked", std::move(ranked)},
            {"slots", std::move(slots)},
            {"phase", to_string(f.phase)}};
}

inline json to_json(const ServerMessage& msg) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SessionCreated>) {
                return {{"type", "session"}, {"session_id", m.session_id}, {"scene", curvesel::to_json(m.scene)}};
            } else if constexpr (std::is_same_v<T, Frame>) {
                return frame_to_json(m);
            } else if constexpr (std::is_same_v<T, EventResult>) {
                json j = {{"type", "event_result"},
                          {"session_id", m.session_id},
                          {"phase", to_string(m.phase)},
                          {"frame", frame_to_json(m.frame)}};
                if (m.selection) {
                    j["selection"] = {{"object_id", m.selection->object_id}, {"is_target", m.selection->is_target}};
                }
                if (m.soft_error) {
                    j["soft_error"] = *m.soft_error;
                }
                return j;
            } else {
                return {{"type", "error"}, {"code", m.code}, {"detail", m.detail}};
            }
        },
        msg);
}

// ---------------------------------------------------------------------------
// Decoding

inline ClientMessage client_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) {
        throw ProtocolError("bad_message", "message must be a JSON object");
    }
    const std::string type = str(j, "type");
    if (type == "new_session") {
        return NewSession{u64(j, "seed")};
    }
    if (type == "set_pose") {
        SetPose m;
        m.session_id = str(j, "session_id");
        m.wrist = vec(j, "wrist", 0);
        m.v_align = vec(j, "v_align", 0);
        m.v_ortho = vec(j, "v_ortho", 0);
        m.flexion = real(j, "flexion");
        m.length = real(j, "length");
        return m;
    }
    if (type == "event") {
        Event m;
        m.session_id = str(j, "session_id");
        const std::string kind = str(j, "kind");
        if (kind == "bend") {
            m.event = SelectionEvent::bend();
        } else if (kind == "straighten") {
            m.event = SelectionEvent::straighten();
        } else if (kind == "cancel") {
            m.event = SelectionEvent::cancel();
        } else if (kind == "slot_touched") {
            m.event = SelectionEvent::touch(static_cast<std::size_t>(u64(j, "slot")));
        } else {
            throw ProtocolError("bad_message", "unknown event kind " + kind);
        }
        return m;
    }
    if (type == "set_paradigm") {
        const std::string p = str(j, "paradigm");
        if (p != "linear" && p != "bezier") {
            throw ProtocolError("bad_message", "paradigm must be linear or bezier");
        }
        return SetParadigm{str(j, "session_id"), p == "linear" ? Paradigm::LinearRay : Paradigm::BezierCurve};
    }
    throw ProtocolError("bad_message", "unknown message type " + type);
}

inline Frame frame_from_json(const json& j) {
    using namespace detail;
    Frame f;
    f.session_id = str(j, "session_id");
    f.kappa = real(j, "kappa");
    for (const auto& p : field(j, "curve_samples")) {
        f.curve_samples.push_back(vec(p, "curve_samples[]"));
    }
    for (const auto& e : field(j, "ranked")) {
        f.ranked.push_back({static_cast<ObjectId>(u64(e, "object_id")), real(e, "d_min"), vec(e, "projection", 0),
                            static_cast<std::size_t>(u64(e, "segment_index")), real(e, "lambda")});
    }
    for (const auto& s : field(j, "slots")) {
        f.slots.push_back({static_cast<std::size_t>(u64(s, "slot_index")), static_cast<ObjectId>(u64(s, "object_id")),
                           vec(s, "slot_center", 0)});
    }
    f.phase = phase(str(j, "phase"));
    return f;
}

inline ServerMessage server_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) {
        throw ProtocolError("bad_message", "message must be a JSON object");
    }
    const std::string type = str(j, "type");
    if (type == "session") {
        try {
            return SessionCreated{str(j, "session_id"), scene_from_json(field(j, "scene"))};
        } catch (const ConfigError& e) {
            throw ProtocolError("bad_message", e.what());
        }
    }
    if (type == "frame") {
        return frame_from_json(j);
    }
    if (type == "event_result") {
        EventResult m;
        m.session_id = str(j, "session_id");
        m.phase = phase(str(j, "phase"));
        m.frame = frame_from_json(field(j, "frame"));
        if (j.contains("selection")) {
            const json& s = j["selection"];
            m.selection = Selection{static_cast<ObjectId>(u64(s, "object_id")), boolean(s, "is_target")};
        }
        if (j.contains("soft_error")) {
            m.soft_error = str(j, "soft_error");
        }
        return m;
    }
    if (type == "error") {
        return Error{str(j, "code"), str(j, "detail")};
    }
    throw ProtocolError("bad_message", "unknown message type " + type);
}

inline std::string serialize(const ClientMessage& m) { return to_json(m).dump(); }
inline std::string serialize(const ServerMessage& m) { return to_json(m).dump(); }

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ProtocolError("bad_message", std::string("invalid JSON: ") + e.what());
    }
}

inline ClientMessage parse_client(const std::string& text) {
    const json j = parse_text(text);
    try {
        return client_from_json(j);
    } catch (const json::exception& e) {
        throw ProtocolError("bad_message", e.what());
    }
}

inline ServerMessage parse_server(const std::string& text) {
    const json j = parse_text(text);
    try {
        return server_from_json(j);
    } catch (const json::exception& e) {
        throw ProtocolError("bad_message", e.what());
    }
}

}  // namespace curvesel::protocol
