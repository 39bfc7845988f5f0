#pragma once
/**
 * @file io.hpp
 * @brief JSON and CSV formats: run configs, scene files, trial tables and
 *        per-technique summaries.
 *
 * Config keys are full words matching the field names of the C++ types.
 * Unknown keys are rejected so a typo cannot silently fall back to a
 * default. Every parse failure is a ConfigError naming the dotted key path.
 */

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvesel/scene.hpp"
#include "curvesel/simulate.hpp"

namespace curvesel {

using nlohmann::json;

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline json to_json(const SceneConfig& c) {
    return {{"object_count", c.object_count},
            {"bounds", {{"width_x", c.bounds.width_x}, {"height_y", c.bounds.height_y}, {"depth_z", c.bounds.depth_z}}},
            {"center", to_json(c.center)},
            {"object_radius", c.object_radius},
            {"seed", c.seed}};
}

inline json to_json(const Scene& s) {
    json objects = json::array();
    for (const auto& o : s.objects) {
        objects.push_back({{"id", o.id}, {"position", to_json(o.position)}, {"radius", o.radius}, {"label", o.label}});
    }
    return {{"config", to_json(s.config)}, {"objects", std::move(objects)}, {"target_id", s.target_id}};
}

// ---------------------------------------------------------------------------
// Checked readers

namespace detail {

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            ok = ok || key == k;
        }
        if (!ok) {
            throw ConfigError(join(path, key), "unknown key");
        }
    }
}

inline double read_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        throw ConfigError(field, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(field, "must be finite");
    }
    return d;
}

inline std::uint64_t read_unsigned(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) {
            throw ConfigError(field, "must be non-negative");
        }
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(field, "expected a non-negative integer");
}

inline Vec3 read_vec3(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) {
        throw ConfigError(field, "expected a 3-element array");
    }
    return {read_number(v[0], field + "[0]"), read_number(v[1], field + "[1]"), read_number(v[2], field + "[2]")};
}

inline std::string read_string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        throw ConfigError(field, "expected a string");
    }
    return v.get<std::string>();
}

template <typename F>
void if_present(const json& obj, const char* key, const std::string& path, F&& read) {
    if (const auto it = obj.find(key); it != obj.end()) {
        read(*it, join(path, key));
    }
}

}  // namespace detail

inline SceneConfig scene_config_from_json(const json& j, const std::string& path = "scene") {
    using namespace detail;
    reject_unknown(j, path, {"object_count", "bounds", "center", "object_radius", "seed"});
    SceneConfig c;
    if_present(j, "object_count", path, [&](const json& v, const std::string& f) {
        if (v.is_number_integer() && v.get<std::int64_t>() < 1) {
            throw ConfigError(f, "must be at least 1");
        }
        c.object_count = static_cast<std::size_t>(read_unsigned(v, f));
    });
    if_present(j, "bounds", path, [&](const json& v, const std::string& f) {
        reject_unknown(v, f, {"width_x", "height_y", "depth_z"});
        if_present(v, "width_x", f, [&](const json& x, const std::string& g) { c.bounds.width_x = read_number(x, g); });
        if_present(v, "height_y", f, [&](const json& x, const std::string& g) { c.bounds.height_y = read_number(x, g); });
        if_present(v, "depth_z", f, [&](const json& x, const std::string& g) { c.bounds.depth_z = read_number(x, g); });
    });
    if_present(j, "center", path, [&](const json& v, const std::string& f) { c.center = read_vec3(v, f); });
    if_present(j, "object_radius", path, [&](const json& v, const std::string& f) { c.object_radius = read_number(v, f); });
    if_present(j, "seed", path, [&](const json& v, const std::string& f) { c.seed = read_unsigned(v, f); });
    try {
        validate(c);
    } catch (const ConfigError& e) {
        throw ConfigError(join(path, e.field()), e.message());
    }
    return c;
}

inline Scene scene_from_json(const json& j) {
    using namespace detail;
    reject_unknown(j, "", {"config", "objects", "target_id"});
    if (!j.contains("config") || !j.contains("objects") || !j.contains("target_id")) {
        throw ConfigError("<root>", "scene requires config, objects and target_id");
    }
    Scene s;
    s.config = scene_config_from_json(j.at("config"), "config");
    const json& objs = j.at("objects");
    if (!objs.is_array()) {
        throw ConfigError("objects", "expected an array");
    }
    std::set<ObjectId> ids;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string f = "objects[" + std::to_string(i) + "]";
        reject_unknown(objs[i], f, {"id", "position", "radius", "label"});
        SceneObject o;
        const std::uint64_t id = read_unsigned(objs[i].at("id"), f + ".id");
        if (id > std::numeric_limits<ObjectId>::max()) {
            throw ConfigError(f + ".id", "out of range");
        }
        o.id = static_cast<ObjectId>(id);
        o.position = read_vec3(objs[i].at("position"), f + ".position");
        o.radius = read_number(objs[i].at("radius"), f + ".radius");
        if (!(o.radius > 0.0)) {
            throw ConfigError(f + ".radius", "must be positive");
        }
        o.label = read_string(objs[i].at("label"), f + ".label");
        if (!ids.insert(o.id).second) {
            throw ConfigError(f + ".id", "duplicate id");
        }
        s.objects.push_back(std::move(o));
    }
    const std::uint64_t target = read_unsigned(j.at("target_id"), "target_id");
    if (!ids.contains(static_cast<ObjectId>(target)) || target > std::numeric_limits<ObjectId>::max()) {
        throw ConfigError("target_id", "does not name an object");
    }
    s.target_id = static_cast<ObjectId>(target);
    return s;
}

// ---------------------------------------------------------------------------
// Run config

struct OutputPaths {
    std::string trials_csv{"trials.csv"};
    std::string summary_json;  ///< empty: derived from trials_csv
    std::string scene_json{"scene.json"};
};

struct RunConfig {
    BlockConfig block;
    OutputPaths output;
    std::uint16_t port{8080};
    std::string static_dir;

    std::string summary_path() const {
        if (!output.summary_json.empty()) {
            return output.summary_json;
        }
        const auto dot = output.trials_csv.rfind('.');
        const auto slash = output.trials_csv.find_last_of('/');
        const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
        return (has_ext ? output.trials_csv.substr(0, dot) : output.trials_csv) + ".summary.json";
    }
};

inline Medium medium_from_string(const std::string& s, const std::string& field) {
    if (s == "on_body") {
        return Medium::OnBody;
    }
    if (s == "mid_air") {
        return Medium::MidAir;
    }
    throw ConfigError(field, "expected \"on_body\" or \"mid_air\"");
}

inline Paradigm paradigm_from_string(const std::string& s, const std::string& field) {
    if (s == "linear_ray" || s == "linear") {
        return Paradigm::LinearRay;
    }
    if (s == "bezier_curve" || s == "bezier") {
        return Paradigm::BezierCurve;
    }
    throw ConfigError(field, "expected \"linear_ray\" or \"bezier_curve\"");
}

inline RunConfig run_config_from_json(const json& j) {
    using namespace detail;
    reject_unknown(j, "", {"scene", "noise", "techniques", "repeats", "participants", "length", "k1", "segments",
                           "slots", "eye", "clearance", "occlusion_cone", "pose", "forearm", "threads", "output",
                           "port", "static_dir"});
    RunConfig rc;
    BlockConfig& b = rc.block;
    TrialSettings& s = b.settings;
    if_present(j, "scene", "", [&](const json& v, const std::string& f) { b.scene = scene_config_from_json(v, f); });
    if_present(j, "noise", "", [&](const json& v, const std::string& f) {
        reject_unknown(v, f, {"angular_sigma", "flexion_sigma", "seed"});
        if_present(v, "angular_sigma", f, [&](const json& x, const std::string& g) {
            b.noise.angular_sigma = read_number(x, g);
            if (b.noise.angular_sigma < 0.0) {
                throw ConfigError(g, "must be non-negative");
            }
        });
        if_present(v, "flexion_sigma", f, [&](const json& x, const std::string& g) {
            b.noise.flexion_sigma = read_number(x, g);
            if (b.noise.flexion_sigma < 0.0) {
                throw ConfigError(g, "must be non-negative");
            }
        });
        if_present(v, "seed", f, [&](const json& x, const std::string& g) { b.noise.seed = read_unsigned(x, g); });
    });
    if_present(j, "techniques", "", [&](const json& v, const std::string& f) {
        if (!v.is_array() || v.empty()) {
            throw ConfigError(f, "expected a non-empty array");
        }
        b.techniques.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string g = f + "[" + std::to_string(i) + "]";
            reject_unknown(v[i], g, {"medium", "paradigm"});
            if (!v[i].contains("medium") || !v[i].contains("paradigm")) {
                throw ConfigError(g, "requires medium and paradigm");
            }
            b.techniques.push_back({medium_from_string(read_string(v[i]["medium"], g + ".medium"), g + ".medium"),
                                    paradigm_from_string(read_string(v[i]["paradigm"], g + ".paradigm"),
                                                         g + ".paradigm")});
        }
    });
    const auto positive_count = [](const json& v, const std::string& f) {
        if (v.is_number_integer() && v.get<std::int64_t>() < 1) {
            throw ConfigError(f, "must be at least 1");
        }
        return static_cast<std::size_t>(read_unsigned(v, f));
    };
    const auto positive_real = [](const json& v, const std::string& f) {
        const double d = read_number(v, f);
        if (!(d > 0.0)) {
            throw ConfigError(f, "must be positive");
        }
        return d;
    };
    if_present(j, "repeats", "", [&](const json& v, const std::string& f) { b.repeats = positive_count(v, f); });
    if_present(j, "participants", "",
               [&](const json& v, const std::string& f) { b.participants = positive_count(v, f); });
    if_present(j, "length", "", [&](const json& v, const std::string& f) { s.length = positive_real(v, f); });
    if_present(j, "k1", "", [&](const json& v, const std::string& f) { s.k1 = positive_real(v, f); });
    if_present(j, "segments", "", [&](const json& v, const std::string& f) { s.segments = positive_count(v, f); });
    if_present(j, "slots", "", [&](const json& v, const std::string& f) { s.slots = positive_count(v, f); });
    if_present(j, "eye", "", [&](const json& v, const std::string& f) { s.eye = read_vec3(v, f); });
    if_present(j, "clearance", "", [&](const json& v, const std::string& f) {
        s.clearance = read_number(v, f);
        if (s.clearance < 0.0) {
            throw ConfigError(f, "must be non-negative");
        }
    });
    if_present(j, "occlusion_cone", "", [&](const json& v, const std::string& f) {
        s.occlusion_cone = read_number(v, f);
        if (s.occlusion_cone < 0.0) {
            throw ConfigError(f, "must be non-negative");
        }
    });
    if_present(j, "pose", "", [&](const json& v, const std::string& f) {
        reject_unknown(v, f, {"wrist", "v_align", "v_ortho", "finger_length"});
        HandPose& p = b.pose_template;
        double finger = distance(p.wrist, p.fingertip_extended);
        if_present(v, "wrist", f, [&](const json& x, const std::string& g) { p.wrist = read_vec3(x, g); });
        if_present(v, "v_align", f, [&](const json& x, const std::string& g) { p.v_align = read_vec3(x, g); });
        if_present(v, "v_ortho", f, [&](const json& x, const std::string& g) { p.v_ortho = read_vec3(x, g); });
        if_present(v, "finger_length", f, [&](const json& x, const std::string& g) { finger = positive_real(x, g); });
        try {
            orthonormal_frame(p.v_align, p.v_ortho);
        } catch (const std::domain_error&) {
            throw ConfigError(f + ".v_ortho", "pose frame must be orthonormal");
        }
        p.fingertip_extended = p.wrist + finger * p.v_align;
        p.fingertip_current = p.fingertip_extended;
    });
    if_present(j, "forearm", "", [&](const json& v, const std::string& f) {
        reject_unknown(v, f, {"elbow", "wrist", "slot_fractions"});
        ForearmFrame& fa = b.forearm;
        if_present(v, "elbow", f, [&](const json& x, const std::string& g) { fa.elbow = read_vec3(x, g); });
        if_present(v, "wrist", f, [&](const json& x, const std::string& g) { fa.wrist = read_vec3(x, g); });
        if_present(v, "slot_fractions", f, [&](const json& x, const std::string& g) {
            if (!x.is_array()) {
                throw ConfigError(g, "expected an array");
            }
            fa.slot_fractions.clear();
            for (std::size_t i = 0; i < x.size(); ++i) {
                fa.slot_fractions.push_back(read_number(x[i], g + "[" + std::to_string(i) + "]"));
            }
        });
        try {
            require_valid(fa);
        } catch (const std::domain_error& e) {
            throw ConfigError(f, e.what());
        }
    });
    if (s.slots > b.forearm.slot_fractions.size()) {
        throw ConfigError("slots", "exceeds the number of forearm slot_fractions");
    }
    if_present(j, "threads", "",
               [&](const json& v, const std::string& f) { b.threads = static_cast<std::size_t>(read_unsigned(v, f)); });
    if_present(j, "output", "", [&](const json& v, const std::string& f) {
        reject_unknown(v, f, {"trials_csv", "summary_json", "scene_json"});
        if_present(v, "trials_csv", f, [&](const json& x, const std::string& g) { rc.output.trials_csv = read_string(x, g); });
        if_present(v, "summary_json", f,
                   [&](const json& x, const std::string& g) { rc.output.summary_json = read_string(x, g); });
        if_present(v, "scene_json", f, [&](const json& x, const std::string& g) { rc.output.scene_json = read_string(x, g); });
    });
    if_present(j, "port", "", [&](const json& v, const std::string& f) {
        const std::uint64_t p = read_unsigned(v, f);
        if (p < 1 || p > 65535) {
            throw ConfigError(f, "must lie in 1..65535");
        }
        rc.port = static_cast<std::uint16_t>(p);
    });
    if_present(j, "static_dir", "", [&](const json& v, const std::string& f) { rc.static_dir = read_string(v, f); });
    return rc;
}

/// Empty path means all defaults.
inline RunConfig load_run_config(const std::string& path) {
    if (path.empty()) {
        return RunConfig{};
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Trial CSV

inline constexpr const char* kTrialCsvHeader =
    "participant,technique_medium,technique_paradigm,repeat,scene_seed,target_id,captured,target_rank,"
    "selected_id,error,d_min_target,target_occluded,kappa_used";

/// Shortest decimal that round-trips.
inline std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string to_csv_row(const TrialRecord& r) {
    const auto opt = [](const auto& o) { return o ? std::to_string(*o) : std::string(); };
    const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    std::string row;
    row += std::to_string(r.participant) + ",";
    row += std::string(to_string(r.technique.medium)) + ",";
    row += std::string(to_string(r.technique.paradigm)) + ",";
    row += std::to_string(r.repeat) + ",";
    row += std::to_string(r.scene_seed) + ",";
    row += std::to_string(r.target_id) + ",";
    row += flag(r.captured) + ",";
    row += opt(r.target_rank) + ",";
    row += opt(r.selected_id) + ",";
    row += (r.error ? flag(*r.error) : std::string()) + ",";
    row += format_real(r.d_min_target) + ",";
    row += flag(r.target_occluded) + ",";
    row += format_real(r.kappa_used);
    return row;
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
    out << kTrialCsvHeader << '\n';
    for (const auto& r : trials) {
        out << to_csv_row(r) << '\n';
    }
}

inline json summary_to_json(const std::vector<TechniqueSummary>& summary) {
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json out = json::object();
    for (const auto& s : summary) {
        out[to_string(s.technique)] = {{"trials", s.trials},
                                       {"capture_rate", s.capture_rate},
                                       {"error_rate", opt(s.error_rate)},
                                       {"mean_target_rank", opt(s.mean_target_rank)},
                                       {"occluded_capture_rate", opt(s.occluded_capture_rate)},
                                       {"mean_d_min", s.mean_d_min}};
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace curvesel
