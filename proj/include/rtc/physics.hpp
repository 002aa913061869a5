// Deterministic quasi-static planar pushing: the system dynamics used by
// every planner. The robot follows its commanded twist exactly; movable
// objects only move while something penetrates them, and are projected out
// along the minimum translation vector with a lever-arm rotation.

#pragma once

#include <cstddef>

#include "rtc/world.hpp"

namespace rtc {

struct PropagationConfig {
    double substep_dt{0.01};
    int max_resolution_iterations{32};
    double penetration_tolerance{kPenetrationTolerance};
    double rotation_gain{1.0};

    /// Throws ContractViolation on non-positive step or tolerance.
    void validate() const;

    friend bool operator==(const PropagationConfig&, const PropagationConfig&) = default;
};

/// Reads the optional "physics" block of a scene file; missing keys keep defaults.
PropagationConfig propagation_config_from_json(const Json& scene_json);
Json propagation_config_to_json(const PropagationConfig& cfg);

struct PropagationResult {
    SystemState state;
    bool valid{true};
    /// Substeps actually simulated (the work done, used by the work clock).
    std::size_t substeps{0};
};

/// Number of equal substeps a control of this duration is split into.
std::size_t substep_count(double duration, double substep_dt);

/// Robot pose after holding a body-frame twist for dt (exact SE(2) exponential).
Pose2 integrate_twist(const Pose2& pose, double vx, double vy, double omega, double dt);

/// Applies `control` from `state`. On failure the state reached when the
/// motion became invalid is returned with valid = false.
PropagationResult propagate(const Scene& scene, const SystemState& state, const Control& control,
                            const PropagationConfig& cfg = {});

}  // namespace rtc
