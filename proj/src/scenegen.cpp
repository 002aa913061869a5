#include "rtc/scenegen.hpp"

#include <algorithm>
#include <string>

#include "rtc/random.hpp"

namespace rtc {

namespace {

bool placement_clear(const Scene& probe_scene, const std::vector<SceneObject>& objects,
                     const std::vector<Pose2>& poses, const Shape& shape, const Pose2& pose,
                     const Pose2& robot_start) {
    for (const auto& wall : probe_scene.walls()) {
        if (shapes_overlap(wall.shape, wall.pose, shape, pose)) return false;
    }
    for (const auto& part : robot_body(probe_scene.robot(), robot_start)) {
        if (shapes_overlap(part.shape, part.pose, shape, pose)) return false;
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (shapes_overlap(objects[i].shape, poses[i], shape, pose)) return false;
    }
    return true;
}

}  // namespace

Pose2 default_robot_start(const Workspace& ws) { return {ws.width / 2, 0.0, kPi / 2}; }

Scene generate_scene(const SceneGenParams& params) {
    if (params.n_objects < 1) throw ContractViolation("n_objects must be at least 1");
    const Workspace& ws = params.workspace;
    const Pose2 robot_start = default_robot_start(ws);
    // Walls and robot model only; used for overlap checks while placing.
    const Scene probe(ws, {{"probe", Shape::circle(0.01)}}, 0, {robot_start, {Pose2(ws.width / 2, ws.height / 2, 0)}});

    Rng rng(params.seed);
    std::vector<SceneObject> objects;
    std::vector<Pose2> poses;
    std::size_t rejections = 0;
    while (objects.size() < params.n_objects) {
        const bool is_goal = objects.empty();
        Shape shape = Shape::circle(1.0);
        if (is_goal) {
            shape = Shape::circle(rng.uniform(params.goal_radius_min, params.goal_radius_max));
        } else if (rng.bernoulli(0.5)) {
            shape = Shape::rectangle(rng.uniform(params.rect_half_min, params.rect_half_max),
                                     rng.uniform(params.rect_half_min, params.rect_half_max));
        } else {
            shape = Shape::circle(rng.uniform(params.circle_radius_min, params.circle_radius_max));
        }
        const double r = shape.bounding_radius();
        const double y_lo = is_goal ? std::max(r, ws.height * params.goal_min_depth) : r;
        for (;;) {
            const Pose2 pose(rng.uniform(r, ws.width - r), rng.uniform(y_lo, ws.height - r), rng.uniform(-kPi, kPi));
            if (placement_clear(probe, objects, poses, shape, pose, robot_start)) {
                objects.push_back({"o" + std::to_string(objects.size() + 1), shape});
                poses.push_back(pose);
                break;
            }
            if (++rejections >= params.max_rejections) {
                throw PackingFailure("could not place " + std::to_string(params.n_objects) + " objects after " +
                                     std::to_string(rejections) + " rejections");
            }
        }
    }
    return Scene(ws, std::move(objects), 0, {robot_start, std::move(poses)});
}

Scene make_empty_scene() {
    const Workspace ws{};
    return Scene(ws, {{"o1", Shape::circle(0.02)}}, 0, {default_robot_start(ws), {Pose2(0.30, 0.30, 0.0)}});
}

Scene make_blocked_scene() {
    const Workspace ws{};
    // Two large blocks against the back wall form a pocket just wider than
    // the palm; the goal sits in its mouth behind a single box.
    std::vector<SceneObject> objects{{"o1", Shape::circle(0.02)},
                                     {"o2", Shape::rectangle(0.07, 0.025)},
                                     {"o3", Shape::rectangle(0.124, 0.0445)},
                                     {"o4", Shape::rectangle(0.124, 0.0445)}};
    return Scene(ws, std::move(objects), 0,
                 {default_robot_start(ws),
                  {Pose2(0.30, 0.33, 0.0), Pose2(0.30, 0.24, 0.0), Pose2(0.125, 0.3545, 0.0),
                   Pose2(0.475, 0.3545, 0.0)}});
}

}  // namespace rtc
