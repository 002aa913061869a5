#include "rtc/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planner_common.hpp"

namespace rtc {

void validate_goal(const Scene& scene, const GoalSpec& goal) {
    if (const auto* rp = std::get_if<RobotPoses>(&goal)) {
        if (rp->poses.empty()) throw ContractViolation("RobotPoses goal needs at least one pose");
        if (!(rp->pos_tol > 0) || !(rp->ang_tol > 0)) throw ContractViolation("RobotPoses tolerances must be positive");
    }
    if (const auto* og = std::get_if<ObjectToRegion>(&goal)) {
        if (og->object >= scene.objects().size()) throw ContractViolation("ObjectToRegion object out of range");
        if (!(og->diameter > 0)) throw ContractViolation("region diameter must be positive");
    }
}

bool goal_satisfied(const Scene& scene, const SystemState& state, const GoalSpec& goal) {
    return std::visit(
        [&](const auto& g) -> bool {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, ReachGoalObject>) {
                return grasp_achieved(scene, state);
            } else if constexpr (std::is_same_v<T, RobotPoses>) {
                return std::any_of(g.poses.begin(), g.poses.end(), [&](const Pose2& p) {
                    return norm(state.robot.position() - p.position()) <= g.pos_tol &&
                           angle_distance(state.robot.theta, p.theta) <= g.ang_tol;
                });
            } else {
                return norm(state.objects.at(g.object).position() - g.centroid) <= g.diameter / 2;
            }
        },
        goal);
}

void PlannerConfig::validate() const {
    if (!(time_limit > 0)) throw ContractViolation("time_limit must be positive");
    if (!(goal_bias >= 0 && goal_bias <= 1)) throw ContractViolation("goal_bias must lie in [0, 1]");
    if (!(kpiece_interior_bias >= 0 && kpiece_interior_bias <= 1)) {
        throw ContractViolation("kpiece_interior_bias must lie in [0, 1]");
    }
    if (!(v_max > 0) || !(omega_max > 0) || !(t_min > 0) || !(t_max >= t_min) || !(kpiece_cell_size > 0) ||
        !(nn_theta_weight >= 0)) {
        throw ContractViolation("planner bounds must be positive");
    }
    physics.validate();
}

double distance(const SystemState& a, const SystemState& b, const GoalSpec& goal, const PlannerConfig& cfg) {
    double d = norm(a.robot.position() - b.robot.position()) +
               cfg.nn_theta_weight * angle_distance(a.robot.theta, b.robot.theta);
    if (const auto* og = std::get_if<ObjectToRegion>(&goal)) {
        d += norm(a.objects.at(og->object).position() - b.objects.at(og->object).position());
    }
    return d;
}

double goal_distance(const Scene& scene, const SystemState& state, const GoalSpec& goal, const PlannerConfig& cfg) {
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, ReachGoalObject>) {
                const Vec2 mouth = compose(state.robot, scene.robot().mouth_pose).position();
                const Vec2 to_goal = state.objects[scene.goal_index()].position() - state.robot.position();
                const double facing = norm(to_goal) > 0
                                          ? angle_distance(state.robot.theta, std::atan2(to_goal.y, to_goal.x))
                                          : 0.0;
                return norm(mouth - state.objects[scene.goal_index()].position()) + cfg.nn_theta_weight * facing;
            } else if constexpr (std::is_same_v<T, RobotPoses>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& p : g.poses) {
                    best = std::min(best, norm(state.robot.position() - p.position()) +
                                              cfg.nn_theta_weight * angle_distance(state.robot.theta, p.theta));
                }
                return best;
            } else {
                const Vec2 obj = state.objects.at(g.object).position();
                const double reach = scene.objects()[g.object].shape.bounding_radius();
                return norm(obj - g.centroid) + 0.5 * std::max(0.0, norm(state.robot.position() - obj) - reach);
            }
        },
        goal);
}

std::string to_string(PlanStatus s) {
    switch (s) {
        case PlanStatus::solved: return "solved";
        case PlanStatus::timeout: return "timeout";
        case PlanStatus::invalid_start: return "invalid_start";
    }
    return "unknown";
}

std::string to_string(PlannerKind k) { return k == PlannerKind::rrt ? "rrt" : "kpiece"; }

PlannerKind planner_kind_from_string(const std::string& s) {
    if (s == "rrt") return PlannerKind::rrt;
    if (s == "kpiece") return PlannerKind::kpiece;
    throw std::invalid_argument("unknown planner: " + s);
}

Control sample_control(Rng& rng, const PlannerConfig& cfg) {
    Control u;
    u.vx = rng.uniform(-cfg.v_max, cfg.v_max);
    u.vy = rng.uniform(-cfg.v_max, cfg.v_max);
    u.omega = rng.uniform(-cfg.omega_max, cfg.omega_max);
    u.duration = rng.uniform(cfg.t_min, cfg.t_max);
    return u;
}

namespace detail {

SystemState sample_state(const Scene& scene, const SystemState& start, const GoalSpec& goal,
                         const PlannerConfig& cfg, Rng& rng) {
    SystemState s = start;
    const auto& ws = scene.workspace();
    if (rng.bernoulli(cfg.goal_bias)) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, ReachGoalObject>) {
                    // Mouth centre on the goal centroid, random approach heading.
                    const double theta = rng.uniform(-kPi, kPi);
                    const Vec2 goal_pos = start.objects[scene.goal_index()].position();
                    const Vec2 offset = Pose2(0, 0, theta).rotate(scene.robot().mouth_pose.position());
                    s.robot = Pose2(goal_pos.x - offset.x, goal_pos.y - offset.y, theta);
                } else if constexpr (std::is_same_v<T, RobotPoses>) {
                    s.robot = g.poses[rng.index(g.poses.size())];
                } else {
                    const Vec2 from = start.objects[g.object].position();
                    Vec2 dir = g.centroid - from;
                    const double len = norm(dir);
                    dir = len > 0 ? dir * (1.0 / len) : Vec2{1, 0};
                    const Vec2 robot = g.centroid - dir * scene.objects()[g.object].shape.bounding_radius();
                    s.objects[g.object] = Pose2(g.centroid.x, g.centroid.y, start.objects[g.object].theta);
                    s.robot = Pose2(robot.x, robot.y, std::atan2(dir.y, dir.x));
                }
            },
            goal);
        return s;
    }
    s.robot = Pose2(rng.uniform(0, ws.width), rng.uniform(0, ws.height), rng.uniform(-kPi, kPi));
    if (const auto* og = std::get_if<ObjectToRegion>(&goal)) {
        s.objects[og->object] =
            Pose2(rng.uniform(0, ws.width), rng.uniform(0, ws.height), start.objects[og->object].theta);
    }
    return s;
}

Plan extract_plan(const std::vector<Motion>& motions, std::size_t last) {
    std::vector<std::size_t> chain;
    for (std::optional<std::size_t> m = last; m; m = motions[*m].parent) chain.push_back(*m);
    std::reverse(chain.begin(), chain.end());
    Plan plan;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        if (k > 0) plan.controls.push_back(motions[chain[k]].control);
        plan.states.push_back(motions[chain[k]].state);
    }
    return plan;
}

std::optional<PlanResult> trivial_outcome(const Scene& scene, const SystemState& start, const GoalSpec& goal) {
    if (!is_valid(scene, start)) {
        PlanResult r;
        r.status = PlanStatus::invalid_start;
        return r;
    }
    if (goal_satisfied(scene, start, goal)) {
        PlanResult r;
        r.status = PlanStatus::solved;
        r.plan.states.push_back(start);
        return r;
    }
    return std::nullopt;
}

}  // namespace detail

PlanResult rrt_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg) {
    WallClock clock;
    return rrt_plan(scene, start, goal, cfg, clock);
}

PlanResult kpiece_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal,
                       const PlannerConfig& cfg) {
    WallClock clock;
    return kpiece_plan(scene, start, goal, cfg, clock);
}

PlanResult plan(PlannerKind kind, const Scene& scene, const SystemState& start, const GoalSpec& goal,
                const PlannerConfig& cfg, Clock& clock) {
    return kind == PlannerKind::rrt ? rrt_plan(scene, start, goal, cfg, clock)
                                    : kpiece_plan(scene, start, goal, cfg, clock);
}

bool replay_matches(const Scene& scene, const Plan& plan, const PropagationConfig& physics) {
    if (plan.states.size() != plan.controls.size() + 1) return false;
    for (std::size_t k = 0; k < plan.controls.size(); ++k) {
        const auto r = propagate(scene, plan.states[k], plan.controls[k], physics);
        if (!r.valid || !(r.state == plan.states[k + 1])) return false;
    }
    return true;
}

Json plan_to_json(const Plan& plan) {
    Json controls = Json::array();
    for (const auto& c : plan.controls) controls.push_back(control_to_json(c));
    Json states = Json::array();
    for (const auto& s : plan.states) states.push_back(state_to_json(s));
    return {{"controls", controls}, {"states", states}, {"planning_time", plan.planning_time}};
}

}  // namespace rtc
