#pragma once
/**
 * @file simulate.hpp
 * @brief Synthetic-user trials over the four selection techniques and the
 *        block runner that aggregates them.
 *
 * The synthetic user:
 *   - LinearRay: points the forearm straight at the target center (kappa = 0).
 *   - BezierCurve: for each candidate kappa, orients the forearm so the curve
 *     passes through the target center, then searches kappa in [0, k1] for
 *     the lowest cost = target d_min + blocker intrusion. Intrusion sums
 *     max(0, r + clearance - center distance) over non-target objects; in
 *     mid-air only objects met before the target along the curve count.
 *   - Gaussian jitter is then applied to the forearm direction and to kappa.
 *
 * OnBody runs the proximity ranking and the bend / straighten / touch state
 * machine; MidAir confirms whatever the ray pierces first. A trial is a pure
 * function of its arguments; every random draw comes from NoiseModel::seed.
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "curvesel/geometry.hpp"
#include "curvesel/gesture.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/rng.hpp"
#include "curvesel/scene.hpp"
#include "curvesel/vec3.hpp"

namespace curvesel {

enum class Medium { OnBody, MidAir };
enum class Paradigm { LinearRay, BezierCurve };

struct Technique {
    Medium medium{Medium::MidAir};
    Paradigm paradigm{Paradigm::LinearRay};

    friend bool operator==(const Technique&, const Technique&) = default;
};

inline const char* to_string(Medium m) { return m == Medium::OnBody ? "on_body" : "mid_air"; }
inline const char* to_string(Paradigm p) { return p == Paradigm::BezierCurve ? "bezier_curve" : "linear_ray"; }

inline std::string to_string(const Technique& t) {
    return std::string(to_string(t.medium)) + "/" + to_string(t.paradigm);
}

/// The four study conditions, baseline first.
inline std::vector<Technique> all_techniques() {
    return {{Medium::MidAir, Paradigm::LinearRay},
            {Medium::MidAir, Paradigm::BezierCurve},
            {Medium::OnBody, Paradigm::LinearRay},
            {Medium::OnBody, Paradigm::BezierCurve}};
}

struct NoiseModel {
    double angular_sigma{0.01};  ///< radians
    double flexion_sigma{0.02};  ///< kappa units
    std::uint64_t seed{7};
};

struct TrialSettings {
    Vec3 eye{0.0, 1.4, 0.0};
    double length{kDefaultReach};
    double k1{kDefaultGain};
    std::size_t segments{kDefaultSegments};
    std::size_t slots{kDefaultSlots};
    double clearance{0.03};  ///< extra margin the curve keeps from blockers, meters
    double occlusion_cone{kDefaultOcclusionCone};
    std::size_t kappa_grid{16};
    double kappa_tolerance{1e-4};
};

inline HandPose default_pose_template() {
    HandPose p;
    p.wrist = {0.15, 1.1, 0.2};
    p.v_align = {0.0, 0.0, 1.0};
    p.v_ortho = {0.0, 1.0, 0.0};
    p.fingertip_extended = p.wrist + 0.18 * p.v_align;
    p.fingertip_current = p.fingertip_extended;
    return p;
}

struct TrialRecord {
    std::size_t participant{0};
    std::size_t repeat{0};
    Technique technique;
    std::uint64_t scene_seed{0};
    ObjectId target_id{0};
    bool captured{false};
    std::optional<std::size_t> target_rank;
    std::optional<ObjectId> selected_id;
    std::optional<bool> error;
    double d_min_target{0.0};
    bool target_occluded{false};
    double kappa_used{0.0};

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// ---------------------------------------------------------------------------
// Aiming

/// Rodrigues rotation of v about the unit axis k.
inline Vec3 rotate(const Vec3& v, const Vec3& k, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return c * v + s * cross(k, v) + (1.0 - c) * dot(k, v) * k;
}

/// Curve offset from the wrist in the (align, ortho) plane:
/// B(t) - p0 = length * (t + kappa t (1 - t), kappa t^2).
inline std::array<double, 2> curve_offset(double kappa, double length, double t) {
    return {length * (t + kappa * t * (1.0 - t)), length * kappa * t * t};
}

/// Forearm frame for which the curve with this kappa passes through `target`
/// (or, if out of reach, ends on the wrist-to-target line). `up_hint` picks
/// the bending plane's roll.
inline Frame aim_through(const Vec3& wrist, const Vec3& up_hint, const Vec3& target, double kappa, double length) {
    const Vec3 sight = target - wrist;
    const double reach = norm(sight);
    const Vec3 u = normalized(sight);
    Vec3 w = normalized(up_hint - dot(up_hint, u) * u);
    if (squared_norm(w) == 0.0) {
        w = normalized(cross(u, Vec3{1.0, 0.0, 0.0}));
        if (squared_norm(w) == 0.0) {
            w = normalized(cross(u, Vec3{0.0, 0.0, 1.0}));
        }
    }
    // |offset(t)| is increasing in t for kappa in [0, 1.5]; bisect for reach.
    double lo = 0.0;
    double hi = 1.0;
    const auto radius_at = [&](double t) {
        const auto c = curve_offset(kappa, length, t);
        return std::hypot(c[0], c[1]);
    };
    if (radius_at(1.0) <= reach) {
        lo = 1.0;
    } else {
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (radius_at(mid) < reach ? lo : hi) = mid;
        }
    }
    const auto c = curve_offset(kappa, length, lo);
    const double theta = std::atan2(c[1], c[0]);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    return {ct * u - st * w, st * u + ct * w};
}

inline HandPose pose_for(const HandPose& tmpl, const Frame& frame, double kappa, double k1) {
    HandPose p = tmpl;
    const double finger = std::max(distance(tmpl.wrist, tmpl.fingertip_extended), 1e-3);
    p.v_align = frame.align;
    p.v_ortho = frame.ortho;
    p.fingertip_extended = p.wrist + finger * frame.align;
    p.fingertip_current = p.wrist + finger * (1.0 - kappa / k1) * frame.align;
    return p;
}

/// Target d_min plus blocker intrusion for one candidate polyline.
inline double aim_cost(const Polyline& line, const Scene& scene, Medium medium, double clearance) {
    const SceneObject& target = scene.target();
    const RankedEntry t = measure_object(line, target);
    double intrusion = 0.0;
    for (const auto& o : scene.objects) {
        if (o.id == target.id) {
            continue;
        }
        const PolylineDistance d = min_distance_to_polyline(o.position, line);
        if (medium == Medium::MidAir &&
            std::tie(d.segment_index, d.best.lambda) > std::tie(t.segment_index, t.lambda)) {
            continue;
        }
        intrusion += std::max(0.0, o.radius + clearance - d.d_min);
    }
    return t.d_min + intrusion;
}

struct AimChoice {
    double kappa{0.0};
    double cost{0.0};
};

/// Grid scan over [0, k1] to bracket the first minimum, then golden-section
/// refinement inside the bracket.
inline AimChoice search_kappa(const Scene& scene, Medium medium, const HandPose& tmpl, const TrialSettings& s) {
    const Vec3 target = scene.target().position;
    const auto cost = [&](double kappa) {
        const Frame f = aim_through(tmpl.wrist, tmpl.v_ortho, target, kappa, s.length);
        const HandPose pose = pose_for(tmpl, f, kappa, s.k1);
        const QuadBezier curve = build_curve(pose, CurveParams{kappa, s.length, s.k1});
        return aim_cost(discretize(curve, s.segments), scene, medium, s.clearance);
    };
    const std::size_t g = std::max<std::size_t>(s.kappa_grid, 2);
    std::size_t best_i = 0;
    double best_cost = cost(0.0);
    for (std::size_t i = 1; i <= g; ++i) {
        const double c = cost(s.k1 * static_cast<double>(i) / static_cast<double>(g));
        if (c < best_cost) {
            best_cost = c;
            best_i = i;
        }
    }
    AimChoice choice{s.k1 * static_cast<double>(best_i) / static_cast<double>(g), best_cost};
    if (best_cost == 0.0) {
        return choice;
    }
    double a = s.k1 * static_cast<double>(best_i == 0 ? 0 : best_i - 1) / static_cast<double>(g);
    double b = s.k1 * static_cast<double>(std::min(best_i + 1, g)) / static_cast<double>(g);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = cost(x1);
    double f2 = cost(x2);
    while (b - a > s.kappa_tolerance) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = cost(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = cost(xm);
    if (fm < choice.cost) {
        choice = {xm, fm};
    }
    return choice;
}

// ---------------------------------------------------------------------------
// Trials

inline TrialRecord simulate_trial(const Technique& technique, const Scene& scene, const NoiseModel& noise,
                                  const HandPose& pose_template, const ForearmFrame& forearm,
                                  const TrialSettings& settings, const std::set<ObjectId>& occluded) {
    Rng rng(noise.seed);
    const SceneObject& target = scene.target();

    double kappa = 0.0;
    if (technique.paradigm == Paradigm::BezierCurve) {
        kappa = search_kappa(scene, technique.medium, pose_template, settings).kappa;
    }
    Frame frame = aim_through(pose_template.wrist, pose_template.v_ortho, target.position, kappa, settings.length);

    const double yaw = rng.normal(0.0, noise.angular_sigma);
    const double pitch = rng.normal(0.0, noise.angular_sigma);
    const double flex = rng.normal(0.0, noise.flexion_sigma);
    frame.align = rotate(frame.align, frame.ortho, yaw);
    const Vec3 side = cross(frame.align, frame.ortho);
    frame = {rotate(frame.align, side, pitch), rotate(frame.ortho, side, pitch)};
    if (technique.paradigm == Paradigm::BezierCurve) {
        kappa = std::clamp(kappa + flex, 0.0, settings.k1);
    }

    const HandPose pose = pose_for(pose_template, frame, kappa, settings.k1);
    const double kappa_used =
        technique.paradigm == Paradigm::BezierCurve ? curvature_from_flexion(flexion_of(pose), settings.k1) : 0.0;
    const Polyline line = discretize(build_curve(pose, CurveParams{kappa_used, settings.length, settings.k1}),
                                     settings.segments);

    TrialRecord r;
    r.technique = technique;
    r.scene_seed = scene.config.seed;
    r.target_id = target.id;
    r.d_min_target = measure_object(line, target).d_min;
    r.target_occluded = occluded.contains(target.id);
    r.kappa_used = kappa_used;

    if (technique.medium == Medium::OnBody) {
        const ProximityResult live = rank_objects(line, scene.objects, settings.slots);
        SelectionState state;
        state = step_state(state, SelectionEvent::bend(), live).state;
        state = step_state(state, SelectionEvent::straighten(), live).state;
        std::optional<std::size_t> slot;
        for (const auto& a : project_to_forearm(*state.frozen(), forearm)) {
            if (a.object_id == target.id) {
                slot = a.slot_index;
            }
        }
        const StepResult done =
            step_state(state, slot ? SelectionEvent::touch(*slot) : SelectionEvent::cancel(), live);
        r.captured = slot.has_value();
        if (slot) {
            r.target_rank = *slot + 1;
        }
        r.selected_id = done.outcome;
    } else {
        r.captured = r.d_min_target == 0.0;
        r.selected_id = ray_hit_select(line, scene.objects);
    }
    if (r.selected_id) {
        r.error = *r.selected_id != target.id;
    }
    return r;
}

inline TrialRecord simulate_trial(const Technique& technique, const Scene& scene, const NoiseModel& noise,
                                  const HandPose& pose_template = default_pose_template(),
                                  const ForearmFrame& forearm = {}, const TrialSettings& settings = {}) {
    return simulate_trial(technique, scene, noise, pose_template, forearm, settings,
                          occlusion_set(scene, settings.eye, settings.occlusion_cone));
}

// ---------------------------------------------------------------------------
// Blocks

struct BlockConfig {
    SceneConfig scene;                      ///< scene.seed is the block seed
    std::vector<std::uint64_t> scene_seeds;  ///< optional explicit seeds, cycled
    std::vector<Technique> techniques{all_techniques()};
    std::size_t repeats{30};
    std::size_t participants{24};
    NoiseModel noise;
    HandPose pose_template{default_pose_template()};
    ForearmFrame forearm;
    TrialSettings settings;
    std::size_t threads{0};  ///< 0 = hardware concurrency
};

struct TechniqueSummary {
    Technique technique;
    std::size_t trials{0};
    double capture_rate{0.0};
    std::optional<double> error_rate;  ///< over trials that produced a selection
    std::optional<double> mean_target_rank;
    std::optional<double> occluded_capture_rate;
    double mean_d_min{0.0};
};

struct BlockResult {
    std::vector<TrialRecord> trials;  ///< ordered by (participant, technique, repeat)
    std::vector<TechniqueSummary> summary;
};

inline std::uint64_t scene_seed_for(const BlockConfig& b, std::size_t participant, std::size_t repeat) {
    if (!b.scene_seeds.empty()) {
        return b.scene_seeds[(participant * b.repeats + repeat) % b.scene_seeds.size()];
    }
    return derive_seed(b.scene.seed, {participant, repeat});
}

inline std::vector<TechniqueSummary> summarize(const std::vector<Technique>& techniques,
                                               const std::vector<TrialRecord>& trials) {
    std::vector<TechniqueSummary> out;
    for (const auto& t : techniques) {
        TechniqueSummary s;
        s.technique = t;
        std::size_t captured = 0, selections = 0, errors = 0, ranked = 0, occluded = 0, occluded_captured = 0;
        double rank_sum = 0.0, d_sum = 0.0;
        for (const auto& r : trials) {
            if (!(r.technique == t)) {
                continue;
            }
            ++s.trials;
            captured += r.captured ? 1 : 0;
            if (r.selected_id) {
                ++selections;
                errors += *r.error ? 1 : 0;
            }
            if (r.target_rank) {
                ++ranked;
                rank_sum += static_cast<double>(*r.target_rank);
            }
            if (r.target_occluded) {
                ++occluded;
                occluded_captured += r.captured ? 1 : 0;
            }
            d_sum += std::abs(r.d_min_target);
        }
        if (s.trials > 0) {
            const auto n = static_cast<double>(s.trials);
            s.capture_rate = static_cast<double>(captured) / n;
            s.mean_d_min = d_sum / n;
        }
        if (selections > 0) {
            s.error_rate = static_cast<double>(errors) / static_cast<double>(selections);
        }
        if (ranked > 0) {
            s.mean_target_rank = rank_sum / static_cast<double>(ranked);
        }
        if (occluded > 0) {
            s.occluded_capture_rate = static_cast<double>(occluded_captured) / static_cast<double>(occluded);
        }
        out.push_back(s);
    }
    return out;
}

/// participants x techniques x repeats trials. Scenes are shared across
/// techniques for a given (participant, repeat); noise streams are keyed by
/// (noise seed, participant, technique, repeat). Output order and content
/// are independent of the thread count.
inline BlockResult run_block(const BlockConfig& b) {
    if (b.repeats < 1) {
        throw ConfigError("repeats", "must be at least 1");
    }
    validate(b.scene);
    const std::size_t nt = b.techniques.size();
    const std::size_t scene_count = b.participants * b.repeats;
    std::vector<Scene> scenes(scene_count);
    std::vector<std::set<ObjectId>> occlusion(scene_count);
    const std::size_t total = scene_count * nt;
    std::vector<TrialRecord> trials(total);

    const auto parallel_for = [&](std::size_t count, auto&& body) {
        std::size_t workers = b.threads != 0 ? b.threads : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min(workers, std::max<std::size_t>(count, 1));
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        const auto run = [&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 1; w < workers; ++w) {
                pool.emplace_back(run);
            }
            run();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    };

    parallel_for(scene_count, [&](std::size_t i) {
        SceneConfig c = b.scene;
        c.seed = scene_seed_for(b, i / b.repeats, i % b.repeats);
        scenes[i] = generate_scene(c);
        occlusion[i] = occlusion_set(scenes[i], b.settings.eye, b.settings.occlusion_cone);
    });

    parallel_for(total, [&](std::size_t i) {
        const std::size_t participant = i / (nt * b.repeats);
        const std::size_t ti = (i / b.repeats) % nt;
        const std::size_t repeat = i % b.repeats;
        const std::size_t si = participant * b.repeats + repeat;
        NoiseModel noise = b.noise;
        noise.seed = derive_seed(b.noise.seed, {participant, ti, repeat});
        TrialRecord r = simulate_trial(b.techniques[ti], scenes[si], noise, b.pose_template, b.forearm, b.settings,
                                       occlusion[si]);
        r.participant = participant;
        r.repeat = repeat;
        trials[i] = r;
    });

    BlockResult out;
    out.summary = summarize(b.techniques, trials);
    out.trials = std::move(trials);
    return out;
}

}  // namespace curvesel
