// Scene description, composite system state and the validity / grasp
// predicates shared by the simulator and the planners.

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtc/geometry.hpp"

namespace rtc {

using Json = nlohmann::ordered_json;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Penetration into a wall or finger tolerated before a state is rejected.
inline constexpr double kPenetrationTolerance = 1e-3;

/// U-shaped planar gripper. The body frame origin is the centre of the
/// palm's front face; fingers extend along local +x, and the mouth is the
/// region between the finger inner faces.
struct RobotModel {
    PosedShape palm;
    PosedShape left_finger;
    PosedShape right_finger;
    Rectangle mouth;
    Pose2 mouth_pose;

    static RobotModel make_default();

    /// palm, left finger, right finger.
    [[nodiscard]] std::array<PosedShape, 3> parts() const { return {palm, left_finger, right_finger}; }
    [[nodiscard]] double mouth_depth() const { return 2.0 * mouth.half_x; }
    /// Radius of a circle about the body origin containing every part.
    [[nodiscard]] double reach_radius() const;
};

struct Workspace {
    double width{0.6};
    double height{0.4};
};

struct SceneObject {
    std::string id;
    Shape shape;
};

struct Wall {
    Shape shape;
    Pose2 pose;
};

/// Robot plus every movable object's pose, in scene object order.
struct SystemState {
    Pose2 robot;
    std::vector<Pose2> objects;

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Robot-frame planar velocity held for `duration` seconds.
struct Control {
    double vx{0};
    double vy{0};
    double omega{0};
    double duration{0};

    friend bool operator==(const Control&, const Control&) = default;
};

class Scene {
public:
    static constexpr double kWallThickness = 0.02;
    /// How far past the open front edge the robot origin may travel.
    static constexpr double kFrontMargin = 0.10;

    Scene(Workspace workspace, std::vector<SceneObject> objects, std::size_t goal_index,
          SystemState initial_state, RobotModel robot = RobotModel::make_default());

    [[nodiscard]] const Workspace& workspace() const { return workspace_; }
    [[nodiscard]] const std::vector<Wall>& walls() const { return walls_; }
    [[nodiscard]] const RobotModel& robot() const { return robot_; }
    [[nodiscard]] const std::vector<SceneObject>& objects() const { return objects_; }
    [[nodiscard]] std::size_t goal_index() const { return goal_index_; }
    [[nodiscard]] const SceneObject& goal() const { return objects_[goal_index_]; }
    [[nodiscard]] const SystemState& initial_state() const { return initial_; }

    /// Index of the object with this id, or nullopt.
    [[nodiscard]] std::optional<std::size_t> find_object(const std::string& id) const;
    [[nodiscard]] bool in_workspace(const Vec2& p) const;

private:
    Workspace workspace_;
    std::vector<Wall> walls_;
    RobotModel robot_;
    std::vector<SceneObject> objects_;
    std::size_t goal_index_;
    SystemState initial_;
};

/// Walls of thickness t covering the left, right and back sides; y = 0 is open.
std::vector<Wall> make_walls(const Workspace& ws, double thickness);

/// Robot parts placed at a world pose.
std::array<PosedShape, 3> robot_body(const RobotModel& robot, const Pose2& robot_pose);

/// Deepest penetration of an object into any wall (0 if clear).
double wall_penetration(const Scene& scene, const Shape& shape, const Pose2& pose);

bool robot_hits_wall(const Scene& scene, const Pose2& robot_pose);

bool is_valid(const Scene& scene, const SystemState& state);

bool grasp_achieved(const Scene& scene, const SystemState& state);

// JSON I/O. Keys follow the scene file format documented in README.md.
Scene scene_from_json(const Json& j);
Json scene_to_json(const Scene& scene);
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

Json pose_to_json(const Pose2& p);
Pose2 pose_from_json(const Json& j);
Json state_to_json(const SystemState& s);
SystemState state_from_json(const Json& j);
Json control_to_json(const Control& c);

}  // namespace rtc
