#include <cmath>
#include <limits>

#include "planner_common.hpp"
#include "rtc/planners.hpp"

namespace rtc {

std::size_t KpieceGrid::add(const Coord& coord, std::size_t motion) {
    if (auto it = index_.find(coord); it != index_.end()) {
        cells_[it->second].motions.push_back(motion);
        return it->second;
    }
    const std::size_t id = cells_.size();
    cells_.push_back({coord, {motion}, 0, 1.0, 0});
    index_.emplace(coord, id);
    Coord probe = coord;
    for (std::size_t axis = 0; axis < dimension_; ++axis) {
        for (const std::int64_t step : {-1, 1}) {
            probe[axis] = coord[axis] + step;
            if (auto it = index_.find(probe); it != index_.end()) {
                ++cells_[it->second].neighbors;
                ++cells_[id].neighbors;
            }
        }
        probe[axis] = coord[axis];
    }
    return id;
}

std::optional<std::size_t> KpieceGrid::find(const Coord& coord) const {
    if (auto it = index_.find(coord); it != index_.end()) return it->second;
    return std::nullopt;
}

double KpieceGrid::importance(std::size_t i) const {
    const Cell& c = cells_[i];
    return c.score / ((1.0 + static_cast<double>(c.visits)) * static_cast<double>(c.motions.size()));
}

std::size_t KpieceGrid::select(Rng& rng, double interior_bias) {
    std::optional<std::size_t> best_interior;
    std::optional<std::size_t> best_exterior;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto& best = interior(i) ? best_interior : best_exterior;
        if (!best || importance(i) > importance(*best)) best = i;
    }
    std::size_t chosen = 0;
    if (best_interior && best_exterior) {
        chosen = rng.bernoulli(interior_bias) ? *best_interior : *best_exterior;
    } else {
        chosen = best_interior ? *best_interior : *best_exterior;
    }
    ++cells_[chosen].visits;
    return chosen;
}

KpiecePlanner::KpiecePlanner(const Scene& scene, SystemState start, GoalSpec goal, PlannerConfig cfg)
    : scene_(scene),
      goal_(std::move(goal)),
      cfg_(cfg),
      rng_(cfg.seed),
      grid_(std::holds_alternative<ObjectToRegion>(goal_) ? 4 : 2) {
    cfg_.validate();
    validate_goal(scene_, goal_);
    motions_.push_back({std::move(start), Control{}, std::nullopt});
    insert(0);
}

KpieceGrid::Coord KpiecePlanner::project(const SystemState& s) const {
    const double cs = cfg_.kpiece_cell_size;
    auto cell = [cs](double v) { return static_cast<std::int64_t>(std::floor(v / cs)); };
    KpieceGrid::Coord c{cell(s.robot.x), cell(s.robot.y)};
    if (const auto* og = std::get_if<ObjectToRegion>(&goal_)) {
        c.push_back(cell(s.objects[og->object].x));
        c.push_back(cell(s.objects[og->object].y));
    }
    return c;
}

void KpiecePlanner::insert(std::size_t motion) {
    grid_.add(project(motions_[motion].state), motion);
    goal_dist_.push_back(goal_distance(scene_, motions_[motion].state, goal_, cfg_));
    if (goal_dist_[motion] < goal_dist_[best_motion_]) best_motion_ = motion;
}

std::optional<std::size_t> KpiecePlanner::expand(Clock& clock) {
    std::size_t cell = 0;
    std::size_t source = 0;
    if (rng_.bernoulli(cfg_.goal_bias)) {
        source = best_motion_;
        cell = *grid_.find(project(motions_[source].state));
        ++grid_.cell(cell).visits;
    } else {
        cell = grid_.select(rng_, cfg_.kpiece_interior_bias);
        const auto& members = grid_.cell(cell).motions;
        source = members[rng_.index(members.size())];
    }
    last_cell_ = cell;
    clock.charge_distance_evals(grid_.size());

    const Control u = sample_control(rng_, cfg_);
    auto result = propagate(scene_, motions_[source].state, u, cfg_.physics);
    clock.charge_substeps(result.substeps);
    if (!result.valid) {
        grid_.cell(cell).score *= kFailurePenalty;
        return std::nullopt;
    }
    motions_.push_back({std::move(result.state), u, source});
    insert(motions_.size() - 1);
    return motions_.size() - 1;
}

PlanResult KpiecePlanner::solve(Clock& clock) {
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
        const auto added = expand(clock);
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

PlanResult kpiece_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg,
                       Clock& clock) {
    KpiecePlanner planner(scene, start, goal, cfg);
    return planner.solve(clock);
}

}  // namespace rtc
