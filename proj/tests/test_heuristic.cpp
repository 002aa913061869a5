#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sweep_oracle.hpp"
#include "rtc/heuristic.hpp"
#include "rtc/scenegen.hpp"

using namespace rtc;

namespace {

Scene line_scene(std::vector<std::pair<Shape, Pose2>> obstacles, Vec2 goal = {0.3, 0.3}) {
    std::vector<SceneObject> specs{{"g", Shape::circle(0.02)}};
    SystemState q{Pose2(0.3, 0.0, kPi / 2), {Pose2(goal.x, goal.y, 0)}};
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        specs.push_back({"o" + std::to_string(i + 2), obstacles[i].first});
        q.objects.push_back(obstacles[i].second);
    }
    return Scene(Workspace{}, std::move(specs), 0, std::move(q));
}

bool overlaps_anything(const Scene& s, const SystemState& q, std::size_t obj, const Pose2& pose) {
    for (const auto& w : s.walls())
        if (shapes_overlap(w.shape, w.pose, s.objects()[obj].shape, pose)) return true;
    for (std::size_t j = 0; j < q.objects.size(); ++j)
        if (j != obj && shapes_overlap(s.objects()[j].shape, q.objects[j], s.objects()[obj].shape, pose)) return true;
    return false;
}

}  // namespace

TEST(FirstBlockingObstacle, ClearCorridor) {
    const Scene s = line_scene({{Shape::rectangle(0.03, 0.03), Pose2(0.05, 0.15, 0)},
                                {Shape::circle(0.03), Pose2(0.55, 0.2, 0)}});
    EXPECT_FALSE(first_blocking_obstacle(s, s.initial_state()));
    EXPECT_TRUE(blocking_obstacles(s, s.initial_state()).empty());
}

TEST(FirstBlockingObstacle, MidpointObject) {
    const Scene s = line_scene({{Shape::circle(0.03), Pose2(0.5, 0.3, 0)}, {Shape::circle(0.02), Pose2(0.3, 0.15, 0)}});
    const auto b = first_blocking_obstacle(s, s.initial_state());
    ASSERT_TRUE(b);
    EXPECT_EQ(b->object, 2u);
}

TEST(FirstBlockingObstacle, StraddlingObjectsNearestFirst) {
    // One object on each side of the line, at roughly 0.3 and 0.7 of the way.
    const Scene s = line_scene({{Shape::rectangle(0.03, 0.015), Pose2(0.25, 0.21, 0)},
                                {Shape::rectangle(0.03, 0.015), Pose2(0.35, 0.09, 0)}});
    const auto all = blocking_obstacles(s, s.initial_state());
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].object, 2u);
    EXPECT_EQ(all[1].object, 1u);
    const auto oracle_hit = oracle::ray_march(s, s.initial_state());
    ASSERT_TRUE(oracle_hit);
    EXPECT_EQ(oracle_hit->object, all[0].object);
    EXPECT_NEAR(all[0].t, oracle_hit->t, 1e-4);
    // Contact times land ahead of the objects' along-track positions by the
    // reach of the fingertips (up to the touch tolerance).
    EXPECT_NEAR(all[0].t, (0.09 - 0.015 - 0.06) / 0.3, 1e-7);
    EXPECT_NEAR(all[1].t, (0.21 - 0.015 - 0.06) / 0.3, 1e-7);
}

TEST(FirstBlockingObstacle, RobotOnGoalCentroid) {
    const Scene s = line_scene({{Shape::circle(0.02), Pose2(0.3, 0.2, 0)}});
    SystemState q = s.initial_state();
    q.robot = Pose2(0.3, 0.3, kPi / 2);
    EXPECT_FALSE(first_blocking_obstacle(s, q));
    EXPECT_FALSE(goal_sweep(s, q));
}

TEST(FirstBlockingObstacle, AgreesWithRayMarchOracle) {
    Rng rng(21);
    int blocked = 0;
    for (int k = 0; k < 100; ++k) {
        SceneGenParams p;
        p.seed = derive_seed(500, k);
        p.n_objects = 4 + rng.index(7);
        const Scene s = generate_scene(p);
        SystemState q = s.initial_state();
        q.robot = Pose2(rng.uniform(0.08, 0.52), rng.uniform(-0.08, 0.0), rng.uniform(-kPi, kPi));
        const auto hit = oracle::ray_march(s, q);
        const auto all = blocking_obstacles(s, q);
        if (!hit) {
            EXPECT_TRUE(all.empty()) << k;
            continue;
        }
        ++blocked;
        ASSERT_FALSE(all.empty()) << k;
        EXPECT_NEAR(all.front().t, hit->t, 1e-4) << k;
        if (all.front().object != hit->object) {
            // Only acceptable as a near tie.
            const auto it = std::find_if(all.begin(), all.end(), [&](const auto& b) { return b.object == hit->object; });
            ASSERT_NE(it, all.end()) << k;
            EXPECT_LT(it->t - all.front().t, 1e-4) << k;
        }
    }
    EXPECT_GT(blocked, 30);
}

TEST(SamplePlacement, NearEmptySceneSucceedsQuickly) {
    const Scene s = line_scene({{Shape::circle(0.02), Pose2(0.3, 0.15, 0)}});
    const auto v = goal_sweep(s, s.initial_state());
    ASSERT_TRUE(v);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        WorkClock clock(WorkCosts{0, 0, 1.0});
        const auto c = sample_placement(s, s.initial_state(), *v, 1, rng, &clock);
        ASSERT_TRUE(c);
        EXPECT_LE(clock.now(), 20.0);
    }
}

TEST(SamplePlacement, FullCoverFails) {
    const Scene s = line_scene({{Shape::circle(0.02), Pose2(0.3, 0.15, 0)}});
    SweptVolume cover;
    cover.footprint = {PosedShape{Shape::rectangle(1.0, 1.0), Pose2()}};
    cover.segment_start = {0.3, 0.2};
    cover.segment_end = {0.3, 0.21};
    cover.heading = kPi / 2;
    Rng rng(1);
    WorkClock clock(WorkCosts{0, 0, 1.0});
    EXPECT_FALSE(sample_placement(s, s.initial_state(), cover, 1, rng, &clock));
    EXPECT_DOUBLE_EQ(clock.now(), static_cast<double>(kPlacementSamples));
}

TEST(SamplePlacement, PinnedSeedOnS3) {
    const Scene s = load_scene(oracle::scene_path("S3.json"));
    const auto b = first_blocking_obstacle(s, s.initial_state());
    ASSERT_TRUE(b);
    const auto v = goal_sweep(s, s.initial_state());
    Rng rng(42);
    const auto c = sample_placement(s, s.initial_state(), *v, b->object, rng);
    ASSERT_TRUE(c);
    EXPECT_EQ(s.objects()[b->object].id, "o5");
    EXPECT_NEAR(c->x, 0.43671144926357447, 1e-12);
    EXPECT_NEAR(c->y, 0.24668625966990637, 1e-12);
    Rng again(42);
    EXPECT_EQ(sample_placement(s, s.initial_state(), *v, b->object, again), c);
}

TEST(HeuristicGuidance, ZeroObstaclesReaches) {
    const Scene s = make_empty_scene();
    HeuristicGuidance g(s, 0);
    EXPECT_EQ(g.next_high_level_action(s.initial_state()), HighLevelAction(ReachGoal{}));
    EXPECT_GE(g.guidance_time(), 0.0);
}

TEST(HeuristicGuidance, EmittedPushesAreCollisionFreeAndOffTheSweep) {
    for (int i = 1; i <= 10; ++i) {
        const Scene s = load_scene(oracle::scene_path("S" + std::to_string(i) + ".json"));
        HeuristicGuidance g(s, 100 + i);
        for (int call = 0; call < 10; ++call) {
            const SystemState& q = s.initial_state();
            const auto a = g.next_high_level_action(q);
            const auto first = first_blocking_obstacle(s, q);
            if (!first) {
                EXPECT_EQ(a, HighLevelAction(ReachGoal{}));
                break;
            }
            const auto* push = std::get_if<PushAction>(&a);
            ASSERT_TRUE(push);
            const std::size_t obj = *s.find_object(push->object_id);
            EXPECT_EQ(obj, first->object);
            if (push->centroid == q.objects[obj].position()) continue;  // no placement this round
            EXPECT_FALSE(overlaps_anything(s, q, obj, Pose2(push->centroid.x, push->centroid.y, q.objects[obj].theta)));
            EXPECT_FALSE(swept_contains(*goal_sweep(s, q), push->centroid));
        }
    }
}

TEST(HeuristicGuidance, BlockedSceneEndToEnd) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    WorkClock clock;
    HeuristicGuidance g(s, 3, &clock);
    const auto first = g.next_high_level_action(s.initial_state());
    ASSERT_TRUE(std::holds_alternative<PushAction>(first));
    EXPECT_EQ(std::get<PushAction>(first).object_id, "o2");

    // After the blocker is cleared out of the way the heuristic reaches.
    SystemState cleared = s.initial_state();
    cleared.objects[*s.find_object("o2")] = Pose2(0.1, 0.1, 0);
    EXPECT_EQ(g.next_high_level_action(cleared), HighLevelAction(ReachGoal{}));
}

TEST(HeuristicGuidance, Deterministic) {
    const Scene s = load_scene(oracle::scene_path("S5.json"));
    HeuristicGuidance a(s, 9), b(s, 9);
    for (int i = 0; i < 5; ++i)
        EXPECT_EQ(a.next_high_level_action(s.initial_state()), b.next_high_level_action(s.initial_state()));
}

TEST(HeuristicGuidance, BlockerCountNonIncreasingWhenPushesSucceed) {
    // Each emitted push is taken to land exactly on its centroid.
    for (int i = 1; i <= 10; ++i) {
        const Scene s = load_scene(oracle::scene_path("S" + std::to_string(i) + ".json"));
        HeuristicGuidance g(s, 1);
        SystemState q = s.initial_state();
        std::size_t prev = blocking_obstacles(s, q).size();
        for (int round = 0; round < 30; ++round) {
            const auto a = g.next_high_level_action(q);
            const auto* push = std::get_if<PushAction>(&a);
            if (!push) {
                EXPECT_EQ(prev, 0u) << "S" << i;
                break;
            }
            auto& pose = q.objects[*s.find_object(push->object_id)];
            pose = Pose2(push->centroid.x, push->centroid.y, pose.theta);
            ASSERT_TRUE(is_valid(s, q)) << "S" << i;
            const std::size_t now = blocking_obstacles(s, q).size();
            EXPECT_LE(now, prev) << "S" << i << " round " << round;
            prev = now;
        }
    }
}

TEST(OracleScript, ClearsTheStraightApproach) {
    for (int i = 1; i <= 10; ++i) {
        const Scene s = load_scene(oracle::scene_path("S" + std::to_string(i) + ".json"));
        const auto script = oracle_script(s, s.initial_state());
        ASSERT_FALSE(script.empty());
        EXPECT_EQ(script.back(), HighLevelAction(ReachGoal{}));
        for (std::size_t k = 0; k + 1 < script.size(); ++k) {
            const auto* p = std::get_if<PushAction>(&script[k]);
            ASSERT_TRUE(p);
            EXPECT_FALSE(check_push_action(s, *p));
        }
    }
    const Scene e = make_empty_scene();
    EXPECT_EQ(oracle_script(e, e.initial_state()), std::vector<HighLevelAction>{ReachGoal{}});
}
