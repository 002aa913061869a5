// Random cluttered-shelf scenes and the hand-built regression scenes.

#pragma once

#include <cstdint>
#include <stdexcept>

#include "rtc/world.hpp"

namespace rtc {

struct SceneGenParams {
    std::size_t n_objects{8};
    std::uint64_t seed{0};
    Workspace workspace{};
    double rect_half_min{0.015};
    double rect_half_max{0.045};
    double circle_radius_min{0.015};
    double circle_radius_max{0.035};
    /// The goal is always a circle small enough to sit inside the mouth.
    double goal_radius_min{0.015};
    double goal_radius_max{0.025};
    /// Lowest goal centroid y as a fraction of the workspace depth.
    double goal_min_depth{0.5};
    std::size_t max_rejections{100000};
};

class PackingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Centred on the open front edge, facing the back wall.
Pose2 default_robot_start(const Workspace& ws);

/// Goal in the rear half, obstacles uniform; no overlaps with each other,
/// the walls or the robot's start footprint. Throws PackingFailure.
Scene generate_scene(const SceneGenParams& params);

/// Only the goal object, in the rear half.
Scene make_empty_scene();

/// Goal in a pocket against the back wall with one box squarely in front of it.
Scene make_blocked_scene();

}  // namespace rtc
