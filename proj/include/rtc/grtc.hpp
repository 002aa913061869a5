// Guided reaching-through-clutter: high-level actions from a pluggable
// guidance source are turned into approach and push planning calls, the
// resulting plans are executed, and the goal is finally reached with the
// remaining budget.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rtc/clock.hpp"
#include "rtc/planners.hpp"

namespace rtc {

/// Push object_id until its centroid lies within the target region.
struct PushAction {
    std::string object_id;
    Vec2 centroid;

    friend bool operator==(const PushAction&, const PushAction&) = default;
};

/// Reach for the goal object; ends the guided loop.
struct ReachGoal {
    friend bool operator==(const ReachGoal&, const ReachGoal&) = default;
};

using HighLevelAction = std::variant<PushAction, ReachGoal>;

Json action_to_json(const HighLevelAction& a);
/// Parses {"type":"push","object_id":..,"x":..,"y":..} or {"type":"reach"}.
HighLevelAction action_from_json(const Json& j);

/// Reason a push action is malformed for this scene, or nullopt if acceptable.
std::optional<std::string> check_push_action(const Scene& scene, const PushAction& a);

struct GrtcConfig {
    double t_overall{300.0};
    double t_pushing{10.0};
    double region_diameter{0.08};
    double approach_clearance{0.01};
    std::uint64_t seed{0};

    void validate() const;
};

class GuidanceProvider {
public:
    virtual ~GuidanceProvider() = default;

    virtual HighLevelAction next_high_level_action(const SystemState& q_current) = 0;

    /// Time spent producing actions so far, as measured by the provider.
    [[nodiscard]] virtual double guidance_time() const = 0;

    /// Whether time spent in next_high_level_action counts against t_overall.
    [[nodiscard]] virtual bool counts_against_budget() const { return true; }
};

/// Replays a fixed list, then proposes ReachGoal forever.
class ScriptedGuidance final : public GuidanceProvider {
public:
    explicit ScriptedGuidance(std::vector<HighLevelAction> script);

    HighLevelAction next_high_level_action(const SystemState& q_current) override;
    [[nodiscard]] double guidance_time() const override { return 0.0; }

private:
    std::vector<HighLevelAction> script_;
    std::size_t next_{0};
};

std::unique_ptr<GuidanceProvider> scripted_guidance(std::vector<HighLevelAction> script);

Json script_to_json(const std::vector<HighLevelAction>& script);
std::vector<HighLevelAction> script_from_json(const Json& j);

class ApproachInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Side-ways (q_a1) and forward (q_a2) approach poses; an invalid candidate
/// is left empty.
struct ApproachStates {
    std::optional<Pose2> side;
    std::optional<Pose2> forward;

    [[nodiscard]] std::vector<Pose2> poses() const;
};

/// Throws ApproachInfeasible when neither approach pose is valid.
ApproachStates compute_approach_states(const Scene& scene, const SystemState& state, std::size_t object,
                                       const Vec2& centroid, double clearance = 0.01);

enum class Phase {
    awaiting_action,
    planning_approach,
    planning_push,
    executing,
    planning_reach,
    done_success,
    done_failure,
};

std::string to_string(Phase p);

enum class SegmentStatus { executed, invalid_action, approach_infeasible, approach_failed, push_failed, out_of_budget };

std::string to_string(SegmentStatus s);

struct PushSegment {
    PushAction action;
    SegmentStatus status{SegmentStatus::invalid_action};
    std::optional<PlanResult> approach;
    std::optional<PlanResult> push;
    SystemState start_state;
    SystemState end_state;
};

struct ExecutionLog {
    SystemState initial_state;
    std::vector<PushSegment> segments;
    bool reach_proposed{false};
    std::optional<PlanResult> reach;
    SystemState final_state;
    bool success{false};
    std::string failure_reason;
    std::size_t proposed_actions{0};
    std::size_t successful_actions{0};
    double planning_time{0};
    double guidance_time{0};
    double elapsed{0};
};

Json log_to_json(const ExecutionLog& log);

/// Receives progress notifications from a GrtcRunner.
class GrtcObserver {
public:
    virtual ~GrtcObserver() = default;
    virtual void on_phase(Phase) {}
    virtual void on_plan(const std::string& /*kind*/, const Plan&) {}
    virtual void on_state(const SystemState&) {}
    virtual void on_counters(const ExecutionLog&) {}
};

/// Executes high-level actions one at a time with the bookkeeping of the
/// guided loop. grtc_run and the interactive service both drive this class,
/// so a session and a scripted run with the same actions and seeds produce
/// identical logs.
class GrtcRunner {
public:
    GrtcRunner(const Scene& scene, SystemState q0, GrtcConfig gcfg, PlannerConfig pcfg, PlannerKind planner,
               Clock& clock, GrtcObserver* observer = nullptr);

    /// Budget consumed so far: clock time minus guidance time that does not count.
    [[nodiscard]] double elapsed() const;
    [[nodiscard]] double remaining() const;

    void record_guidance(double seconds, bool counts_against_budget);

    /// Approach, push and execute one action. A failure leaves q_current unchanged.
    const PushSegment& run_push(const PushAction& action);

    /// Final reach with the remaining budget; finalises the log.
    const ExecutionLog& run_reach();

    /// Ends the run without reaching (timeout or provider failure).
    const ExecutionLog& abort(const std::string& reason);

    /// Continues this run on another clock with a fresh seed stream; the
    /// budget consumed so far carries over.
    [[nodiscard]] GrtcRunner fork(Clock& clock, std::uint64_t seed) const;

    [[nodiscard]] const Scene& scene() const { return scene_; }
    [[nodiscard]] const SystemState& current() const { return q_current_; }
    [[nodiscard]] const ExecutionLog& log() const { return log_; }
    [[nodiscard]] bool finished() const { return finished_; }

private:
    PlanResult plan_call(const SystemState& start, const GoalSpec& goal, double budget);
    SystemState execute(const Plan& plan);
    void finish();

    const Scene& scene_;
    GrtcConfig gcfg_;
    PlannerConfig pcfg_;
    PlannerKind planner_;
    Clock* clock_;
    GrtcObserver* observer_;
    SystemState q_current_;
    ExecutionLog log_;
    double t0_;
    double excluded_{0};
    std::uint64_t calls_{0};
    bool finished_{false};
};

/// Feeds actions from `guidance` into the runner until it proposes reaching.
/// Returns false when the run ended first (budget exhausted or provider failure).
bool run_guidance(GrtcRunner& runner, GuidanceProvider& guidance, Clock& clock);

ExecutionLog grtc_run(const Scene& scene, const SystemState& q0, GuidanceProvider& guidance, const GrtcConfig& gcfg,
                      const PlannerConfig& pcfg, PlannerKind planner, Clock& clock);
ExecutionLog grtc_run(const Scene& scene, const SystemState& q0, GuidanceProvider& guidance, const GrtcConfig& gcfg,
                      const PlannerConfig& pcfg, PlannerKind planner);

}  // namespace rtc
