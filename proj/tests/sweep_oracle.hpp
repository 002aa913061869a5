#pragma once

#include <optional>

#include "oracles.hpp"
#include "rtc/world.hpp"

namespace oracle {

struct MarchHit {
    std::size_t object;
    double t;
};

// Dense ray march: translate the robot footprint in steps of 1e-4 and report
// the first step at which any part overlaps a non-goal object.
inline std::optional<MarchHit> ray_march(const rtc::Scene& scene, const rtc::SystemState& q) {
    const rtc::Vec2 a = q.robot.position();
    const rtc::Vec2 b = q.objects[scene.goal_index()].position();
    const double heading = std::atan2(b.y - a.y, b.x - a.x);
    const auto parts = scene.robot().parts();
    const int steps = 10000;
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const rtc::Pose2 body(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), heading);
        for (std::size_t i = 0; i < q.objects.size(); ++i) {
            if (i == scene.goal_index()) continue;
            for (const auto& part : parts) {
                const rtc::Pose2 placed = place(body, part.pose);
                if (rtc::shapes_overlap(part.shape, placed, scene.objects()[i].shape, q.objects[i])) return MarchHit{i, t};
            }
        }
    }
    return std::nullopt;
}

}  // namespace oracle
