#include "rtc/heuristic.hpp"

#include <algorithm>
#include <cmath>

namespace rtc {

namespace {

// Work charged per continuous contact query, in overlap-test units.
constexpr std::size_t kContactQueryChecks = 15;

SweptVolume sweep_between(const Scene& scene, const Vec2& start, const Vec2& end) {
    const Vec2 d = end - start;
    SweptVolume v;
    const auto parts = scene.robot().parts();
    v.footprint.assign(parts.begin(), parts.end());
    v.segment_start = start;
    v.segment_end = end;
    v.heading = std::atan2(d.y, d.x);
    return v;
}

// Earliest contact between the swept footprint and a posed shape.
std::optional<double> sweep_contact(const SweptVolume& v, const Shape& shape, const Pose2& pose) {
    std::optional<double> best;
    const Pose2 start = v.body_pose(0.0);
    const Vec2 disp = v.segment_end - v.segment_start;
    for (const auto& part : v.footprint) {
        const auto t = first_contact_time(part.shape, compose(start, part.pose), disp, shape, pose);
        if (t && (!best || *t < *best)) best = t;
    }
    return best;
}

bool clear_of_scene(const Scene& scene, const SystemState& state, std::size_t object, const Pose2& pose) {
    const Shape& shape = scene.objects()[object].shape;
    for (const auto& w : scene.walls()) {
        if (shapes_overlap(w.shape, w.pose, shape, pose)) return false;
    }
    for (std::size_t j = 0; j < state.objects.size(); ++j) {
        if (j != object && shapes_overlap(scene.objects()[j].shape, state.objects[j], shape, pose)) return false;
    }
    return true;
}

}  // namespace

std::optional<SweptVolume> goal_sweep(const Scene& scene, const SystemState& state) {
    const Vec2 start = state.robot.position();
    const Vec2 end = state.objects[scene.goal_index()].position();
    if (norm(end - start) < kTouchEpsilon) return std::nullopt;
    return sweep_between(scene, start, end);
}

std::vector<BlockingObstacle> blocking_obstacles(const Scene& scene, const SystemState& state) {
    std::vector<BlockingObstacle> out;
    const auto v = goal_sweep(scene, state);
    if (!v) return out;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        if (i == scene.goal_index()) continue;
        if (const auto t = sweep_contact(*v, scene.objects()[i].shape, state.objects[i])) out.push_back({i, *t});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

std::optional<BlockingObstacle> first_blocking_obstacle(const Scene& scene, const SystemState& state) {
    const auto all = blocking_obstacles(scene, state);
    if (all.empty()) return std::nullopt;
    return all.front();
}

std::optional<Vec2> sample_placement(const Scene& scene, const SystemState& state, const SweptVolume& swept,
                                     std::size_t object, Rng& rng, Clock* clock, std::size_t max_samples) {
    if (object >= state.objects.size()) throw ContractViolation("placement object does not exist");
    const double r = min_enclosing_circle(scene.objects()[object].shape, state.objects[object]).radius;
    const Workspace& ws = scene.workspace();
    if (2 * r >= ws.width || 2 * r >= ws.height) return std::nullopt;
    const double theta = state.objects[object].theta;
    for (std::size_t k = 0; k < max_samples; ++k) {
        const Vec2 c{rng.uniform(r, ws.width - r), rng.uniform(r, ws.height - r)};
        if (clock) clock->charge_geometry_checks(1);
        if (clear_of_scene(scene, state, object, Pose2(c.x, c.y, theta)) && !swept_contains(swept, c)) return c;
    }
    return std::nullopt;
}

HeuristicGuidance::HeuristicGuidance(const Scene& scene, std::uint64_t seed, Clock* clock)
    : scene_(scene), rng_(seed), clock_(clock) {}

HighLevelAction HeuristicGuidance::next_high_level_action(const SystemState& q_current) {
    Clock& clock = clock_ ? *clock_ : static_cast<Clock&>(own_clock_);
    const double t0 = clock.now();
    HighLevelAction action = ReachGoal{};
    clock.charge_geometry_checks(kContactQueryChecks * scene_.robot().parts().size() * (q_current.objects.size() - 1));
    if (const auto blocker = first_blocking_obstacle(scene_, q_current)) {
        const auto v = goal_sweep(scene_, q_current);
        if (const auto c = sample_placement(scene_, q_current, *v, blocker->object, rng_, clock_)) {
            action = PushAction{scene_.objects()[blocker->object].id, *c};
        } else {
            // No placement this round; propose a push back onto itself so the
            // framework records a failed action and asks again.
            action = PushAction{scene_.objects()[blocker->object].id, q_current.objects[blocker->object].position()};
        }
    }
    time_ += clock.now() - t0;
    return action;
}

std::unique_ptr<GuidanceProvider> heuristic_guidance(const Scene& scene, std::uint64_t seed, Clock* clock) {
    return std::make_unique<HeuristicGuidance>(scene, seed, clock);
}

std::vector<HighLevelAction> oracle_script(const Scene& scene, const SystemState& state, double region_diameter) {
    const Vec2 goal = state.objects[scene.goal_index()].position();
    const Vec2 start = state.robot.position();
    const double len = norm(goal - start);
    if (len < kTouchEpsilon) return {ReachGoal{}};
    const Vec2 dir = (goal - start) / len;
    // Stop with the mouth centred on the goal rather than the palm.
    const SweptVolume v = sweep_between(scene, start, goal - dir * (scene.robot().mouth_depth() / 2));

    SystemState planned = state;
    std::vector<HighLevelAction> script;
    std::vector<std::size_t> blockers;
    for (std::size_t i = 0; i < planned.objects.size(); ++i) {
        if (i != scene.goal_index() && sweep_contact(v, scene.objects()[i].shape, planned.objects[i])) {
            blockers.push_back(i);
        }
    }
    // Nearest first, so earlier pushes do not have to cross later blockers.
    std::stable_sort(blockers.begin(), blockers.end(), [&](std::size_t a, std::size_t b) {
        return dot(planned.objects[a].position() - start, dir) < dot(planned.objects[b].position() - start, dir);
    });

    for (const std::size_t b : blockers) {
        const Vec2 c = planned.objects[b].position();
        const Shape& shape = scene.objects()[b].shape;
        const double theta = planned.objects[b].theta;
        // The push only lands within d/2 of the target, so the whole
        // neighbourhood of the target has to stay off the sweep.
        const double m = region_diameter / 2;
        auto touches_sweep = [&](const Vec2& p) {
            for (const Vec2 shift : {Vec2{0, 0}, Vec2{m, 0}, Vec2{-m, 0}, Vec2{0, m}, Vec2{0, -m}}) {
                if (sweep_contact(v, shape, Pose2(p.x + shift.x, p.y + shift.y, theta))) return true;
            }
            return false;
        };
        const double side = cross(dir, c - start) >= 0 ? 1.0 : -1.0;
        std::optional<Vec2> target;
        for (double offset = 0.02; offset <= 0.40 && !target; offset += 0.01) {
            for (const double s : {side, -side}) {
                for (const double along : {0.0, -0.5, 0.5}) {
                    const Vec2 lateral = perp(dir) * s;
                    const Vec2 cand = c + (lateral + dir * along) * offset;
                    const Pose2 pose(cand.x, cand.y, theta);
                    if (!scene.in_workspace(cand) || !clear_of_scene(scene, planned, b, pose)) continue;
                    if (touches_sweep(cand)) continue;
                    target = cand;
                    break;
                }
                if (target) break;
            }
        }
        if (!target) continue;
        planned.objects[b] = Pose2(target->x, target->y, planned.objects[b].theta);
        script.push_back(PushAction{scene.objects()[b].id, *target});
    }
    script.push_back(ReachGoal{});
    return script;
}

}  // namespace rtc
