#pragma once

#include <optional>
#include <vector>

#include "rtc/planners.hpp"

namespace rtc::detail {

/// Target state for nearest-neighbour selection: goal-directed with
/// probability cfg.goal_bias, uniform over the workspace otherwise.
SystemState sample_state(const Scene& scene, const SystemState& start, const GoalSpec& goal,
                         const PlannerConfig& cfg, Rng& rng);

Plan extract_plan(const std::vector<Motion>& motions, std::size_t last);

/// Result for an invalid start or an already satisfied goal; nullopt otherwise.
std::optional<PlanResult> trivial_outcome(const Scene& scene, const SystemState& start, const GoalSpec& goal);

}  // namespace rtc::detail
