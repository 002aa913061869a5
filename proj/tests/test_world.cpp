#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rtc/scenegen.hpp"
#include "rtc/world.hpp"

using namespace rtc;

namespace {

Json two_object_scene_json() {
    return Json::parse(R"({
        "workspace": {"width": 0.6, "height": 0.4},
        "robot": {"pose": [0.3, 0.0, 1.5707963267948966]},
        "objects": [
            {"id": "g", "shape": {"type": "circle", "radius": 0.02}, "pose": [0.3, 0.3, 0.0], "goal": true},
            {"id": "b", "shape": {"type": "rect", "half": [0.03, 0.02]}, "pose": [0.2, 0.2, 0.4]}
        ]
    })");
}

// Robot pose that puts a world point at the given mouth-frame coordinates.
Pose2 robot_for_mouth_point(const Scene& scene, const Vec2& world, const Vec2& mouth_local, double heading) {
    const RobotModel& r = scene.robot();
    const Vec2 body_local = r.mouth_pose.apply(mouth_local);
    const Pose2 h(0, 0, heading);
    const Vec2 offset = h.rotate(body_local);
    return {world.x - offset.x, world.y - offset.y, heading};
}

}  // namespace

TEST(RobotModel, FingersClearOfPalmAndMouthBetweenFingers) {
    const RobotModel r = RobotModel::make_default();
    // Fingers may abut the palm face but never penetrate it.
    EXPECT_FALSE(penetration(r.palm.shape, r.palm.pose, r.left_finger.shape, r.left_finger.pose));
    EXPECT_FALSE(penetration(r.palm.shape, r.palm.pose, r.right_finger.shape, r.right_finger.pose));
    const double left_inner = r.left_finger.pose.y - r.left_finger.shape.rect().half_y;
    const double right_inner = r.right_finger.pose.y + r.right_finger.shape.rect().half_y;
    EXPECT_LE(r.mouth_pose.y + r.mouth.half_y, left_inner + 1e-12);
    EXPECT_GE(r.mouth_pose.y - r.mouth.half_y, right_inner - 1e-12);
}

TEST(Scene, WallsTileClosedSides) {
    const Scene s = make_empty_scene();
    const double w = s.workspace().width;
    const double h = s.workspace().height;
    // Points just outside each closed side are inside some wall; the open side is not.
    auto in_wall = [&](Vec2 p) {
        for (const auto& wall : s.walls())
            if (oracle::inside(wall.shape, wall.pose, p)) return true;
        return false;
    };
    for (double t = 0.0; t <= 1.0; t += 0.01) {
        EXPECT_TRUE(in_wall({-1e-4, t * h}));
        EXPECT_TRUE(in_wall({w + 1e-4, t * h}));
        EXPECT_TRUE(in_wall({t * w, h + 1e-4}));
        EXPECT_FALSE(in_wall({t * w, -1e-4}));
    }
    EXPECT_TRUE(in_wall({-1e-4, h + 1e-4}));
    EXPECT_TRUE(in_wall({w + 1e-4, h + 1e-4}));
}

TEST(SceneJson, RoundTrip) {
    const Scene s = scene_from_json(two_object_scene_json());
    const Json again = scene_to_json(s);
    const Scene s2 = scene_from_json(again);
    EXPECT_EQ(scene_to_json(s2).dump(), again.dump());
    EXPECT_EQ(s2.goal().id, "g");
    EXPECT_EQ(s2.objects()[1].shape, Shape::rectangle(0.03, 0.02));
    EXPECT_EQ(s2.initial_state(), s.initial_state());
}

TEST(SceneJson, RejectsTwoGoals) {
    Json j = two_object_scene_json();
    j["objects"][1]["goal"] = true;
    EXPECT_THROW(scene_from_json(j), std::invalid_argument);
}

TEST(SceneJson, RejectsMissingGoal) {
    Json j = two_object_scene_json();
    j["objects"][0].erase("goal");
    EXPECT_THROW(scene_from_json(j), std::invalid_argument);
}

TEST(SceneJson, RejectsDuplicateIdsAndBadShapes) {
    Json j = two_object_scene_json();
    j["objects"][1]["id"] = "g";
    EXPECT_THROW(scene_from_json(j), std::invalid_argument);
    j = two_object_scene_json();
    j["objects"][1]["shape"] = {{"type", "triangle"}};
    EXPECT_THROW(scene_from_json(j), std::invalid_argument);
    j = two_object_scene_json();
    j["objects"][1]["shape"] = {{"type", "circle"}, {"radius", -0.1}};
    EXPECT_THROW(scene_from_json(j), std::invalid_argument);
    EXPECT_THROW(scene_from_json(Json::parse("[1, 2]")), std::invalid_argument);
}

TEST(Validity, InteriorStateIsValid) {
    const Scene s = scene_from_json(two_object_scene_json());
    EXPECT_TRUE(is_valid(s, s.initial_state()));
}

TEST(Validity, RobotBeyondBackWall) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.robot = Pose2(0.3, 1.4, kPi / 2);
    EXPECT_FALSE(is_valid(s, q));
}

TEST(Validity, RobotTouchingWall) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.robot = Pose2(0.02, 0.2, kPi / 2);  // palm half-length 0.05 reaches x < 0
    EXPECT_FALSE(is_valid(s, q));
}

TEST(Validity, ObjectJustOffTheFrontEdge) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.objects[1] = Pose2(0.2, -0.001, 0.0);
    EXPECT_FALSE(is_valid(s, q));
    q.objects[1] = Pose2(0.2, 0.001, 0.0);
    EXPECT_TRUE(is_valid(s, q));
}

TEST(Validity, ObjectPenetrationIntoWallBeyondTolerance) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    // Rectangle half_x 0.03 at theta 0: left edge at x - 0.03.
    q.objects[1] = Pose2(0.03 - 0.0005, 0.2, 0.0);
    EXPECT_TRUE(is_valid(s, q));
    q.objects[1] = Pose2(0.03 - 0.002, 0.2, 0.0);
    EXPECT_FALSE(is_valid(s, q));
}

TEST(Validity, DimensionMismatchIsContractViolation) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.objects.pop_back();
    EXPECT_THROW(is_valid(s, q), ContractViolation);
}

TEST(Grasp, CentredInMouth) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.robot = robot_for_mouth_point(s, q.objects[0].position(), {0, 0}, kPi / 2);
    EXPECT_TRUE(grasp_achieved(s, q));
    EXPECT_TRUE(is_valid(s, q));
}

TEST(Grasp, FarAway) {
    const Scene s = scene_from_json(two_object_scene_json());
    SystemState q = s.initial_state();
    q.robot = Pose2(0.3, -0.2, kPi / 2);
    EXPECT_FALSE(grasp_achieved(s, q));
}

TEST(Grasp, MouthBoundary) {
    const Scene s = scene_from_json(two_object_scene_json());
    const double hx = s.robot().mouth.half_x;
    SystemState q = s.initial_state();
    // Open end of the mouth: the fingers stay clear of the goal.
    q.robot = robot_for_mouth_point(s, q.objects[0].position(), {hx - 1e-6, 0}, kPi / 2);
    EXPECT_TRUE(grasp_achieved(s, q));
    q.robot = robot_for_mouth_point(s, q.objects[0].position(), {hx + 1e-6, 0}, kPi / 2);
    EXPECT_FALSE(grasp_achieved(s, q));
}

TEST(Grasp, FingerPenetrationRejects) {
    // A goal wider than the mouth cannot be grasped even with its centroid inside.
    Json j = two_object_scene_json();
    j["objects"][0]["shape"]["radius"] = 0.04;
    const Scene s = scene_from_json(j);
    SystemState q = s.initial_state();
    q.robot = robot_for_mouth_point(s, q.objects[0].position(), {0, 0}, kPi / 2);
    EXPECT_FALSE(grasp_achieved(s, q));
}

TEST(StateJson, RoundTrip) {
    const Scene s = scene_from_json(two_object_scene_json());
    const SystemState q = s.initial_state();
    EXPECT_EQ(state_from_json(state_to_json(q)), q);
}
