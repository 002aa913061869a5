#include "rtc/world.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace rtc {

RobotModel RobotModel::make_default() {
    RobotModel r{
        .palm = {Shape::rectangle(0.01, 0.05), Pose2(-0.01, 0.0, 0.0)},
        .left_finger = {Shape::rectangle(0.03, 0.005), Pose2(0.03, 0.035, 0.0)},
        .right_finger = {Shape::rectangle(0.03, 0.005), Pose2(0.03, -0.035, 0.0)},
        .mouth = {0.03, 0.03},
        .mouth_pose = Pose2(0.03, 0.0, 0.0),
    };
    return r;
}

double RobotModel::reach_radius() const {
    double r = 0;
    for (const auto& part : parts()) r = std::max(r, norm(part.pose.position()) + part.shape.bounding_radius());
    return r;
}

std::vector<Wall> make_walls(const Workspace& ws, double t) {
    const double w = ws.width;
    const double h = ws.height;
    return {
        {Shape::rectangle(t / 2, h / 2), Pose2(-t / 2, h / 2, 0)},                 // left
        {Shape::rectangle(t / 2, h / 2), Pose2(w + t / 2, h / 2, 0)},              // right
        {Shape::rectangle(w / 2 + t, t / 2), Pose2(w / 2, h + t / 2, 0)},          // back
    };
}

Scene::Scene(Workspace workspace, std::vector<SceneObject> objects, std::size_t goal_index,
             SystemState initial_state, RobotModel robot)
    : workspace_(workspace),
      walls_(make_walls(workspace, kWallThickness)),
      robot_(std::move(robot)),
      objects_(std::move(objects)),
      goal_index_(goal_index),
      initial_(std::move(initial_state)) {
    if (!(workspace_.width > 0) || !(workspace_.height > 0)) {
        throw std::invalid_argument("workspace extents must be positive");
    }
    if (objects_.empty() || goal_index_ >= objects_.size()) {
        throw std::invalid_argument("scene needs a goal object");
    }
    if (initial_.objects.size() != objects_.size()) {
        throw std::invalid_argument("initial state does not match the object list");
    }
    std::set<std::string> ids;
    for (const auto& o : objects_) {
        if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate object id: " + o.id);
    }
}

std::optional<std::size_t> Scene::find_object(const std::string& id) const {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        if (objects_[i].id == id) return i;
    }
    return std::nullopt;
}

bool Scene::in_workspace(const Vec2& p) const {
    return p.x >= 0 && p.x <= workspace_.width && p.y >= 0 && p.y <= workspace_.height;
}

std::array<PosedShape, 3> robot_body(const RobotModel& robot, const Pose2& robot_pose) {
    auto parts = robot.parts();
    for (auto& part : parts) part.pose = compose(robot_pose, part.pose);
    return parts;
}

double wall_penetration(const Scene& scene, const Shape& shape, const Pose2& pose) {
    double deepest = 0;
    for (const auto& wall : scene.walls()) {
        if (auto c = penetration(wall.shape, wall.pose, shape, pose)) deepest = std::max(deepest, c->depth);
    }
    return deepest;
}

bool robot_hits_wall(const Scene& scene, const Pose2& robot_pose) {
    for (const auto& part : robot_body(scene.robot(), robot_pose)) {
        for (const auto& wall : scene.walls()) {
            if (shapes_overlap(part.shape, part.pose, wall.shape, wall.pose)) return true;
        }
    }
    return false;
}

bool is_valid(const Scene& scene, const SystemState& state) {
    if (state.objects.size() != scene.objects().size()) {
        throw ContractViolation("state has " + std::to_string(state.objects.size()) + " objects, scene has " +
                                std::to_string(scene.objects().size()));
    }
    const auto& ws = scene.workspace();
    const Pose2& r = state.robot;
    if (r.x < 0 || r.x > ws.width || r.y < -Scene::kFrontMargin || r.y > ws.height) return false;
    if (robot_hits_wall(scene, r)) return false;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        const Pose2& p = state.objects[i];
        if (!scene.in_workspace(p.position())) return false;
        if (wall_penetration(scene, scene.objects()[i].shape, p) > kPenetrationTolerance) return false;
    }
    return true;
}

bool grasp_achieved(const Scene& scene, const SystemState& state) {
    const RobotModel& robot = scene.robot();
    const Pose2& goal_pose = state.objects.at(scene.goal_index());
    const Shape& goal_shape = scene.goal().shape;
    const Pose2 mouth = compose(state.robot, robot.mouth_pose);
    const Vec2 local = mouth.apply_inverse(goal_pose.position());
    if (std::abs(local.x) > robot.mouth.half_x || std::abs(local.y) > robot.mouth.half_y) return false;
    for (const auto* finger : {&robot.left_finger, &robot.right_finger}) {
        const Pose2 fp = compose(state.robot, finger->pose);
        if (auto c = penetration(finger->shape, fp, goal_shape, goal_pose); c && c->depth > kPenetrationTolerance) {
            return false;
        }
    }
    return true;
}

Json pose_to_json(const Pose2& p) { return Json::array({p.x, p.y, p.theta}); }

Pose2 pose_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("pose must be [x, y, theta]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json state_to_json(const SystemState& s) {
    Json objects = Json::array();
    for (const auto& p : s.objects) objects.push_back(pose_to_json(p));
    return {{"robot", pose_to_json(s.robot)}, {"objects", objects}};
}

SystemState state_from_json(const Json& j) {
    SystemState s;
    s.robot = pose_from_json(j.at("robot"));
    for (const auto& p : j.at("objects")) s.objects.push_back(pose_from_json(p));
    return s;
}

Json control_to_json(const Control& c) {
    return {{"vx", c.vx}, {"vy", c.vy}, {"omega", c.omega}, {"duration", c.duration}};
}

namespace {

Shape shape_from_json(const Json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "rect") {
        const auto& half = j.at("half");
        if (!half.is_array() || half.size() != 2) throw std::invalid_argument("rect half must be [hx, hy]");
        return Shape::rectangle(half[0].get<double>(), half[1].get<double>());
    }
    if (type == "circle") return Shape::circle(j.at("radius").get<double>());
    throw std::invalid_argument("unknown shape type: " + type);
}

Json shape_to_json(const Shape& s) {
    if (s.is_rectangle()) return {{"type", "rect"}, {"half", Json::array({s.rect().half_x, s.rect().half_y})}};
    return {{"type", "circle"}, {"radius", s.circ().radius}};
}

}  // namespace

Scene scene_from_json(const Json& j) {
    try {
        Workspace ws;
        ws.width = j.at("workspace").at("width").get<double>();
        ws.height = j.at("workspace").at("height").get<double>();
        SystemState initial;
        initial.robot = pose_from_json(j.at("robot").at("pose"));
        std::vector<SceneObject> objects;
        std::optional<std::size_t> goal;
        for (const auto& o : j.at("objects")) {
            objects.push_back({o.at("id").get<std::string>(), shape_from_json(o.at("shape"))});
            initial.objects.push_back(pose_from_json(o.at("pose")));
            if (o.value("goal", false)) {
                if (goal) throw std::invalid_argument("scene has more than one goal object");
                goal = objects.size() - 1;
            }
        }
        if (!goal) throw std::invalid_argument("scene has no goal object");
        return Scene(ws, std::move(objects), *goal, std::move(initial));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed scene JSON: ") + e.what());
    }
}

Json scene_to_json(const Scene& scene) {
    Json objects = Json::array();
    for (std::size_t i = 0; i < scene.objects().size(); ++i) {
        const auto& o = scene.objects()[i];
        objects.push_back({{"id", o.id},
                           {"shape", shape_to_json(o.shape)},
                           {"pose", pose_to_json(scene.initial_state().objects[i])},
                           {"goal", i == scene.goal_index()}});
    }
    return {{"workspace", {{"width", scene.workspace().width}, {"height", scene.workspace().height}}},
            {"robot", {{"pose", pose_to_json(scene.initial_state().robot)}}},
            {"objects", objects}};
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path);
    return scene_from_json(Json::parse(in));
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scene file: " + path);
    out << scene_to_json(scene).dump(2) << '\n';
}

}  // namespace rtc
