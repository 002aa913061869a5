// Straight-line probe guidance: find the first obstacle on the robot's
// straight path to the goal object and move it somewhere off that path.

#pragma once

#include <cstdint>
#include <optional>

#include "rtc/clock.hpp"
#include "rtc/grtc.hpp"
#include "rtc/random.hpp"

namespace rtc {

/// Robot footprint translated at fixed heading from its current position to
/// the goal centroid. nullopt if the robot already sits on the goal centroid.
std::optional<SweptVolume> goal_sweep(const Scene& scene, const SystemState& state);

struct BlockingObstacle {
    std::size_t object;
    /// Sweep parameter of first contact, in [0, 1].
    double t;
};

/// Every non-goal object touched by the sweep, ordered by first contact.
std::vector<BlockingObstacle> blocking_obstacles(const Scene& scene, const SystemState& state);

/// Earliest non-goal object touched by the sweep.
std::optional<BlockingObstacle> first_blocking_obstacle(const Scene& scene, const SystemState& state);

inline constexpr std::size_t kPlacementSamples = 1000;

/// Rejection-samples a centroid for `object` (orientation unchanged) that is
/// clear of walls and other objects and outside `swept`. Each candidate is
/// charged as one geometry check when a clock is given.
std::optional<Vec2> sample_placement(const Scene& scene, const SystemState& state, const SweptVolume& swept,
                                     std::size_t object, Rng& rng, Clock* clock = nullptr,
                                     std::size_t max_samples = kPlacementSamples);

class HeuristicGuidance final : public GuidanceProvider {
public:
    /// `clock` (optional) is charged for geometry work and used to measure guidance time.
    HeuristicGuidance(const Scene& scene, std::uint64_t seed, Clock* clock = nullptr);

    HighLevelAction next_high_level_action(const SystemState& q_current) override;
    [[nodiscard]] double guidance_time() const override { return time_; }

private:
    const Scene& scene_;
    Rng rng_;
    Clock* clock_;
    WallClock own_clock_;
    double time_{0};
};

std::unique_ptr<GuidanceProvider> heuristic_guidance(const Scene& scene, std::uint64_t seed = 0,
                                                     Clock* clock = nullptr);

/// Deterministic stand-in for a competent operator: pushes every object
/// blocking the straight approach sideways until it no longer touches the
/// sweep, then reaches. Returns just [ReachGoal] when nothing blocks.
std::vector<HighLevelAction> oracle_script(const Scene& scene, const SystemState& state,
                                           double region_diameter = 0.08);

}  // namespace rtc
