#include <limits>

#include "planner_common.hpp"
#include "rtc/planners.hpp"

namespace rtc {

RrtPlanner::RrtPlanner(const Scene& scene, SystemState start, GoalSpec goal, PlannerConfig cfg)
    : scene_(scene), goal_(std::move(goal)), cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    validate_goal(scene_, goal_);
    motions_.push_back({std::move(start), Control{}, std::nullopt});
}

SystemState RrtPlanner::sample_target() {
    return detail::sample_state(scene_, motions_.front().state, goal_, cfg_, rng_);
}

std::optional<std::size_t> RrtPlanner::extend(Clock& clock) {
    const SystemState target = sample_target();
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < motions_.size(); ++i) {
        const double d = distance(motions_[i].state, target, goal_, cfg_);
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    clock.charge_distance_evals(motions_.size());

    const Control u = sample_control(rng_, cfg_);
    auto result = propagate(scene_, motions_[nearest].state, u, cfg_.physics);
    clock.charge_substeps(result.substeps);
    if (!result.valid) return std::nullopt;
    motions_.push_back({std::move(result.state), u, nearest});
    return motions_.size() - 1;
}

PlanResult RrtPlanner::solve(Clock& clock) {
    const double t0 = clock.now();
    if (auto trivial = detail::trivial_outcome(scene_, motions_.front().state, goal_)) {
        trivial->planning_time = clock.now() - t0;
        trivial->plan.planning_time = trivial->planning_time;
        trivial->motions = motions_.size();
        return *trivial;
    }
    PlanResult result;
    while (clock.now() - t0 < cfg_.time_limit) {
        ++result.iterations;
        const auto added = extend(clock);
        if (added && goal_satisfied(scene_, motions_[*added].state, goal_)) {
            result.status = PlanStatus::solved;
            result.plan = detail::extract_plan(motions_, *added);
            break;
        }
    }
    result.planning_time = clock.now() - t0;
    result.plan.planning_time = result.planning_time;
    result.motions = motions_.size();
    return result;
}

PlanResult rrt_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg,
                    Clock& clock) {
    RrtPlanner planner(scene, start, goal, cfg);
    return planner.solve(clock);
}

}  // namespace rtc
