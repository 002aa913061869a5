#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rtc/grtc.hpp"
#include "rtc/heuristic.hpp"
#include "rtc/scenegen.hpp"

using namespace rtc;

namespace {

// Goal in the far right corner, one 0.08 x 0.04 block at (0.30, 0.30).
Scene approach_scene(Vec2 block = {0.30, 0.30}) {
    return Scene(Workspace{}, {{"g", Shape::circle(0.02)}, {"b", Shape::rectangle(0.04, 0.02)}}, 0,
                 SystemState{Pose2(0.3, 0.0, kPi / 2), {Pose2(0.52, 0.05, 0), Pose2(block.x, block.y, 0)}});
}

GrtcConfig grtc_config(std::uint64_t seed, double t_overall = 30.0, double t_pushing = 10.0) {
    GrtcConfig g;
    g.seed = seed;
    g.t_overall = t_overall;
    g.t_pushing = t_pushing;
    return g;
}

// Checks the structural invariants every log must satisfy.
void expect_log_consistent(const Scene& scene, const ExecutionLog& log, const GrtcConfig& g) {
    SystemState expected = log.initial_state;
    std::size_t executed = 0;
    double plan_sum = 0;
    for (const auto& seg : log.segments) {
        EXPECT_EQ(seg.start_state, expected);
        if (seg.approach) plan_sum += seg.approach->planning_time;
        if (seg.push) plan_sum += seg.push->planning_time;
        if (seg.status == SegmentStatus::executed) {
            ++executed;
            ASSERT_TRUE(seg.approach && seg.push);
            EXPECT_TRUE(seg.approach->solved());
            EXPECT_TRUE(seg.push->solved());
            // The push plan starts where the approach plan ends.
            EXPECT_EQ(seg.push->plan.states.front(), seg.approach->plan.states.back());
            EXPECT_EQ(seg.end_state, seg.push->plan.states.back());
            const std::size_t obj = *scene.find_object(seg.action.object_id);
            EXPECT_LE(norm(seg.end_state.objects[obj].position() - seg.action.centroid), g.region_diameter / 2);
        } else {
            EXPECT_EQ(seg.end_state, seg.start_state);
        }
        expected = seg.end_state;
    }
    if (log.reach) {
        plan_sum += log.reach->planning_time;
        if (log.reach->solved()) EXPECT_EQ(log.reach->plan.states.front(), expected);
    }
    EXPECT_EQ(log.successful_actions, executed);
    EXPECT_EQ(log.proposed_actions, log.segments.size() + (log.reach_proposed ? 1 : 0));
    EXPECT_LE(log.successful_actions, log.proposed_actions);
    EXPECT_DOUBLE_EQ(log.planning_time, plan_sum);
    EXPECT_LE(log.planning_time + log.guidance_time, g.t_overall + 0.2);
    if (log.success) {
        EXPECT_TRUE(grasp_achieved(scene, log.final_state));
        EXPECT_EQ(log.final_state, log.reach->plan.states.back());
    }
}

}  // namespace

TEST(ApproachStates, ForwardPoseExample) {
    const Scene s = approach_scene();
    const auto a = compute_approach_states(s, s.initial_state(), 1, {0.45, 0.30});
    const double R = std::hypot(0.04, 0.02);
    EXPECT_NEAR(R, 0.044721, 1e-6);
    ASSERT_TRUE(a.forward.has_value());
    EXPECT_NEAR(a.forward->x, 0.30 - (R + 0.07), 1e-12);
    EXPECT_NEAR(a.forward->x, 0.18528, 1e-5);
    EXPECT_NEAR(a.forward->y, 0.30, 1e-12);
    EXPECT_NEAR(angle_distance(a.forward->theta, 0.0), 0.0, 1e-12);
}

TEST(ApproachStates, SidePoseExample) {
    const Scene s = approach_scene();
    const auto a = compute_approach_states(s, s.initial_state(), 1, {0.45, 0.30});
    ASSERT_TRUE(a.side.has_value());
    // The +y candidate would put the gripper through the back wall.
    EXPECT_NEAR(a.side->x, 0.30, 1e-12);
    EXPECT_NEAR(a.side->y, 0.30 - 0.11472, 1e-5);
    EXPECT_NEAR(angle_distance(a.side->theta, kPi / 2), 0.0, 1e-12);
    EXPECT_EQ(a.poses().size(), 2u);
}

TEST(ApproachStates, SideChoiceFollowsWallDistance) {
    // Low block: both side candidates are valid; the one farther from a wall wins.
    const Scene s = approach_scene({0.30, 0.17});
    const auto a = compute_approach_states(s, s.initial_state(), 1, {0.45, 0.17});
    ASSERT_TRUE(a.side.has_value());
    const double d = std::hypot(0.04, 0.02) + 0.07;
    // Candidates at y = 0.17 +- d; walls at y = 0.4 (back) and none in front,
    // so the lower one is farther from every wall.
    EXPECT_NEAR(a.side->y, 0.17 - d, 1e-12);
}

TEST(ApproachStates, TargetAlongPlusY) {
    const Scene s = approach_scene({0.30, 0.20});
    const auto a = compute_approach_states(s, s.initial_state(), 1, {0.30, 0.35});
    ASSERT_TRUE(a.forward.has_value());
    EXPECT_NEAR(a.forward->x, 0.30, 1e-12);
    EXPECT_LT(a.forward->y, 0.20);
    EXPECT_NEAR(angle_distance(a.forward->theta, kPi / 2), 0.0, 1e-12);
}

TEST(ApproachStates, GripperFacesObjectAtStandoff) {
    // Property: every returned pose faces the object centroid from R + s away.
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Scene s = approach_scene({rng.uniform(0.1, 0.5), rng.uniform(0.08, 0.3)});
        const Vec2 target{rng.uniform(0.05, 0.55), rng.uniform(0.05, 0.35)};
        const Vec2 c = s.initial_state().objects[1].position();
        if (norm(target - c) < 1e-3) continue;
        try {
            const auto a = compute_approach_states(s, s.initial_state(), 1, target);
            for (const Pose2& p : a.poses()) {
                const Vec2 to_obj = c - p.position();
                EXPECT_NEAR(norm(to_obj), std::hypot(0.04, 0.02) + 0.07, 1e-12);
                EXPECT_NEAR(angle_distance(p.theta, std::atan2(to_obj.y, to_obj.x)), 0.0, 1e-12);
                SystemState q = s.initial_state();
                q.robot = p;
                EXPECT_TRUE(is_valid(s, q));
            }
        } catch (const ApproachInfeasible&) {
        }
    }
}

TEST(ApproachStates, CornerObjectIsInfeasible) {
    const Scene s(Workspace{}, {{"g", Shape::circle(0.02)}, {"b", Shape::circle(0.015)}}, 0,
                  SystemState{Pose2(0.3, 0.0, kPi / 2), {Pose2(0.5, 0.1, 0), Pose2(0.03, 0.37, 0)}});
    EXPECT_THROW(compute_approach_states(s, s.initial_state(), 1, {0.3, 0.37}), ApproachInfeasible);
    EXPECT_THROW(compute_approach_states(s, s.initial_state(), 1, {0.03, 0.37}), ContractViolation);
}

TEST(ScriptedGuidance, ReplaysThenReaches) {
    ScriptedGuidance g({PushAction{"o2", {0.5, 0.1}}, ReachGoal{}});
    const SystemState q;
    EXPECT_EQ(g.next_high_level_action(q), HighLevelAction(PushAction{"o2", {0.5, 0.1}}));
    EXPECT_EQ(g.next_high_level_action(q), HighLevelAction(ReachGoal{}));
    for (int i = 0; i < 3; ++i) EXPECT_EQ(g.next_high_level_action(q), HighLevelAction(ReachGoal{}));
    EXPECT_EQ(g.guidance_time(), 0.0);
    EXPECT_THROW(ScriptedGuidance({}), ContractViolation);
}

TEST(ActionJson, RoundTripAndErrors) {
    const std::vector<HighLevelAction> script{PushAction{"o2", {0.5, 0.1}}, PushAction{"o3", {0.25, 0.125}},
                                              ReachGoal{}};
    EXPECT_EQ(script_from_json(script_to_json(script)), script);
    EXPECT_EQ(script_from_json(Json::parse(script_to_json(script).dump())), script);
    EXPECT_THROW(action_from_json(Json::parse(R"({"type":"lift"})")), std::invalid_argument);
    EXPECT_THROW(action_from_json(Json::parse(R"({"type":"push","object_id":"o2"})")), std::invalid_argument);
    EXPECT_THROW(script_from_json(Json::parse(R"({"type":"reach"})")), std::invalid_argument);
}

TEST(PushActionCheck, Rejections) {
    const Scene s = make_blocked_scene();
    EXPECT_FALSE(check_push_action(s, PushAction{"o2", {0.1, 0.1}}));
    EXPECT_TRUE(check_push_action(s, PushAction{"nope", {0.1, 0.1}}));
    EXPECT_TRUE(check_push_action(s, PushAction{s.goal().id, {0.1, 0.1}}));
    EXPECT_TRUE(check_push_action(s, PushAction{"o2", {0.7, 0.1}}));
    EXPECT_TRUE(check_push_action(s, PushAction{"o2", {0.1, std::nan("")}}));
}

TEST(GrtcConfig, Validation) {
    EXPECT_NO_THROW(GrtcConfig{}.validate());
    GrtcConfig g;
    g.t_pushing = 400;
    EXPECT_THROW(g.validate(), ContractViolation);
    g = {};
    g.region_diameter = 0;
    EXPECT_THROW(g.validate(), ContractViolation);
}

TEST(GrtcRun, NoGuidanceOnEmptyScene) {
    const Scene s = make_empty_scene();
    ScriptedGuidance g({ReachGoal{}});
    WorkClock clock;
    const auto gcfg = grtc_config(1);
    const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, PlannerKind::rrt, clock);
    EXPECT_TRUE(log.success) << log.failure_reason;
    EXPECT_TRUE(log.segments.empty());
    EXPECT_EQ(log.proposed_actions, 1u);
    EXPECT_EQ(log.successful_actions, 0u);
    ASSERT_TRUE(log.reach.has_value());
    EXPECT_TRUE(log.reach->solved());
    expect_log_consistent(s, log, gcfg);
}

TEST(GrtcRun, ReachOnlyEqualsRawPlanner) {
    const Scene s = load_scene(oracle::scene_path("S4.json"));
    for (const auto kind : {PlannerKind::rrt, PlannerKind::kpiece}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto gcfg = grtc_config(seed, 5.0, 5.0);
            ScriptedGuidance g({ReachGoal{}});
            WorkClock c1;
            const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, kind, c1);

            PlannerConfig raw;
            raw.time_limit = gcfg.t_overall;
            raw.seed = derive_seed(seed, 0);
            WorkClock c2;
            const auto direct = plan(kind, s, s.initial_state(), ReachGoalObject{}, raw, c2);
            ASSERT_TRUE(log.reach.has_value());
            EXPECT_EQ(log.reach->status, direct.status);
            EXPECT_EQ(log.reach->iterations, direct.iterations);
            EXPECT_EQ(log.reach->planning_time, direct.planning_time);
            EXPECT_EQ(plan_to_json(log.reach->plan).dump(), plan_to_json(direct.plan).dump());
            EXPECT_EQ(log.success, direct.solved());
        }
    }
}

TEST(GrtcRun, ImpossibleApproachIsSkipped) {
    const Scene s(Workspace{}, {{"g", Shape::circle(0.02)}, {"b", Shape::circle(0.015)}}, 0,
                  SystemState{Pose2(0.3, 0.0, kPi / 2), {Pose2(0.3, 0.2, 0), Pose2(0.03, 0.37, 0)}});
    ScriptedGuidance g({PushAction{"b", {0.3, 0.37}}, PushAction{"zz", {0.3, 0.3}}, ReachGoal{}});
    WorkClock clock;
    const auto gcfg = grtc_config(2);
    const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, PlannerKind::rrt, clock);
    ASSERT_EQ(log.segments.size(), 2u);
    EXPECT_EQ(log.segments[0].status, SegmentStatus::approach_infeasible);
    EXPECT_FALSE(log.segments[0].approach.has_value());
    EXPECT_EQ(log.segments[1].status, SegmentStatus::invalid_action);
    EXPECT_EQ(log.proposed_actions, 3u);
    EXPECT_EQ(log.successful_actions, 0u);
    EXPECT_TRUE(log.reach_proposed);
    expect_log_consistent(s, log, gcfg);
}

TEST(GrtcRun, SelectingGoalObjectMeansReach) {
    const Scene s = make_empty_scene();
    ScriptedGuidance g({PushAction{s.goal().id, {0.1, 0.1}}, PushAction{"never", {0.1, 0.1}}});
    WorkClock clock;
    const auto log = grtc_run(s, s.initial_state(), g, grtc_config(3), PlannerConfig{}, PlannerKind::rrt, clock);
    EXPECT_TRUE(log.segments.empty());
    EXPECT_TRUE(log.reach_proposed);
    EXPECT_EQ(log.proposed_actions, 1u);
}

TEST(GrtcRun, GuidanceFailureEndsRun) {
    struct Broken final : GuidanceProvider {
        HighLevelAction next_high_level_action(const SystemState&) override { throw std::runtime_error("gone"); }
        [[nodiscard]] double guidance_time() const override { return 0; }
    } broken;
    const Scene s = make_empty_scene();
    WorkClock clock;
    const auto log = grtc_run(s, s.initial_state(), broken, grtc_config(0), PlannerConfig{}, PlannerKind::rrt, clock);
    EXPECT_FALSE(log.success);
    EXPECT_NE(log.failure_reason.find("gone"), std::string::npos);
    EXPECT_FALSE(log.reach_proposed);
}

TEST(GrtcRun, BlockedSceneWithOnePush) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    const auto script = oracle_script(s, s.initial_state());
    ASSERT_EQ(script.size(), 2u);
    ASSERT_TRUE(std::holds_alternative<PushAction>(script[0]));
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ScriptedGuidance g(script);
        WorkClock clock;
        const auto gcfg = grtc_config(seed);
        const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, PlannerKind::rrt, clock);
        expect_log_consistent(s, log, gcfg);
        EXPECT_EQ(log.proposed_actions, 2u);
        if (log.success) {
            ++successes;
            EXPECT_GE(log.successful_actions, 1u);
        }
    }
    EXPECT_GE(successes, 8);
}

TEST(GrtcRun, HeuristicRunsAreConsistent) {
    for (const char* name : {"S1.json", "S6.json"}) {
        const Scene s = load_scene(oracle::scene_path(name));
        WorkClock clock;
        HeuristicGuidance g(s, 4, &clock);
        const auto gcfg = grtc_config(4, 20.0, 5.0);
        const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, PlannerKind::kpiece, clock);
        expect_log_consistent(s, log, gcfg);
        EXPECT_GT(log.guidance_time, 0.0);
    }
}

TEST(GrtcRun, ExhaustedBudgetFails) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    std::vector<HighLevelAction> pushes(50, PushAction{"o2", {0.12, 0.2}});
    ScriptedGuidance g(pushes);
    WorkClock clock;
    const auto gcfg = grtc_config(0, 2.0, 1.0);
    const auto log = grtc_run(s, s.initial_state(), g, gcfg, PlannerConfig{}, PlannerKind::rrt, clock);
    EXPECT_FALSE(log.success);
    EXPECT_FALSE(log.failure_reason.empty());
    expect_log_consistent(s, log, gcfg);
}

TEST(GrtcRun, DeterministicUnderWorkClock) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    auto once = [&] {
        ScriptedGuidance g(oracle_script(s, s.initial_state()));
        WorkClock clock;
        return log_to_json(grtc_run(s, s.initial_state(), g, grtc_config(7), PlannerConfig{}, PlannerKind::rrt, clock))
            .dump();
    };
    EXPECT_EQ(once(), once());
}

TEST(GrtcRunner, ForkCarriesBudget) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    WorkClock clock;
    GrtcRunner runner(s, s.initial_state(), grtc_config(1), PlannerConfig{}, PlannerKind::rrt, clock);
    runner.run_push(PushAction{"o2", {0.12, 0.2}});
    const double used = runner.elapsed();
    EXPECT_GT(used, 0.0);
    WorkClock other;
    GrtcRunner copy = runner.fork(other, 99);
    EXPECT_DOUBLE_EQ(copy.elapsed(), used);
    EXPECT_EQ(copy.current(), runner.current());
    EXPECT_EQ(copy.log().proposed_actions, 1u);
    copy.run_reach();
    EXPECT_TRUE(copy.finished());
    EXPECT_FALSE(runner.finished());
    EXPECT_THROW(copy.run_reach(), ContractViolation);
}

TEST(GrtcRunner, HumanTimeExcludedFromBudget) {
    const Scene s = make_empty_scene();
    WorkClock clock;
    GrtcRunner runner(s, s.initial_state(), grtc_config(1), PlannerConfig{}, PlannerKind::rrt, clock);
    runner.record_guidance(12.0, false);
    runner.record_guidance(1.5, true);
    EXPECT_DOUBLE_EQ(runner.log().guidance_time, 13.5);
    EXPECT_DOUBLE_EQ(runner.elapsed(), -12.0);
    EXPECT_DOUBLE_EQ(runner.remaining(), 42.0);
}

TEST(LogJson, CountersAndSegments) {
    const Scene s = load_scene(oracle::scene_path("S-blocked.json"));
    ScriptedGuidance g(oracle_script(s, s.initial_state()));
    WorkClock clock;
    const auto log = grtc_run(s, s.initial_state(), g, grtc_config(0), PlannerConfig{}, PlannerKind::rrt, clock);
    const Json j = Json::parse(log_to_json(log).dump());
    EXPECT_EQ(j.at("proposed_actions").get<std::size_t>(), log.proposed_actions);
    EXPECT_EQ(j.at("successful_actions").get<std::size_t>(), log.successful_actions);
    EXPECT_EQ(j.at("success").get<bool>(), log.success);
    ASSERT_EQ(j.at("segments").size(), log.segments.size());
    EXPECT_EQ(action_from_json(j["segments"][0]["action"]), HighLevelAction(log.segments[0].action));
    EXPECT_EQ(state_from_json(j.at("final_state")), log.final_state);
    EXPECT_EQ(state_from_json(j.at("initial_state")), s.initial_state());
}
