// Minimal library walkthrough: bend the finger, rank the scene against the
// curve, lock, and pick the top slot.

#include <iostream>

#include "curvesel/gesture.hpp"
#include "curvesel/proximity.hpp"
#include "curvesel/scene.hpp"

int main() {
    using namespace curvesel;

    SceneConfig cfg;
    cfg.seed = 2024;
    const Scene scene = generate_scene(cfg);

    HandPose hand;
    hand.wrist = {0.15, 1.1, 0.2};
    hand.fingertip_extended = hand.wrist + Vec3{0, 0, 0.18};
    hand.fingertip_current = hand.wrist + Vec3{0, 0, 0.12};  // index finger partly bent

    const double kappa = curvature_from_flexion(flexion_of(hand));
    const Polyline ray = discretize(build_curve(hand, {kappa, kDefaultReach, kDefaultGain}));
    const ProximityResult live = rank_objects(ray, scene.objects);

    std::cout << "kappa = " << kappa << "\n";
    for (const auto& slot : project_to_forearm(live, ForearmFrame{})) {
        const auto& e = live.ranked[slot.slot_index];
        std::cout << "slot " << slot.slot_index << ": " << scene.object(e.object_id).label << " (d_min "
                  << e.d_min << " m)\n";
    }

    SelectionState state;
    state = step_state(state, SelectionEvent::bend(), live).state;
    state = step_state(state, SelectionEvent::straighten(), live).state;
    const StepResult done = step_state(state, SelectionEvent::touch(0), live);
    if (done.outcome) {
        std::cout << "selected " << scene.object(*done.outcome).label
                  << (*done.outcome == scene.target_id ? " (target)" : "") << "\n";
    }
}
