#include "rtc/grtc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtc/random.hpp"

namespace rtc {

Json action_to_json(const HighLevelAction& a) {
    if (const auto* p = std::get_if<PushAction>(&a)) {
        return Json{{"type", "push"}, {"object_id", p->object_id}, {"x", p->centroid.x}, {"y", p->centroid.y}};
    }
    return Json{{"type", "reach"}};
}

HighLevelAction action_from_json(const Json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "reach") return ReachGoal{};
        if (type == "push") {
            return PushAction{j.at("object_id").get<std::string>(), {j.at("x").get<double>(), j.at("y").get<double>()}};
        }
        throw std::invalid_argument("unknown action type '" + type + "'");
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed action: ") + e.what());
    }
}

std::optional<std::string> check_push_action(const Scene& scene, const PushAction& a) {
    const auto idx = scene.find_object(a.object_id);
    if (!idx) return "unknown object '" + a.object_id + "'";
    if (*idx == scene.goal_index()) return std::string("goal object must use reach");
    if (!std::isfinite(a.centroid.x) || !std::isfinite(a.centroid.y) || !scene.in_workspace(a.centroid)) {
        return std::string("centroid outside workspace");
    }
    return std::nullopt;
}

void GrtcConfig::validate() const {
    if (!(t_overall > 0) || !(t_pushing > 0) || t_pushing > t_overall) {
        throw ContractViolation("grtc budgets must satisfy 0 < t_pushing <= t_overall");
    }
    if (!(region_diameter > 0)) throw ContractViolation("region diameter must be positive");
    if (!(approach_clearance >= 0)) throw ContractViolation("approach clearance must be non-negative");
}

ScriptedGuidance::ScriptedGuidance(std::vector<HighLevelAction> script) : script_(std::move(script)) {
    if (script_.empty()) throw ContractViolation("script must not be empty");
}

HighLevelAction ScriptedGuidance::next_high_level_action(const SystemState& /*q_current*/) {
    if (next_ < script_.size()) return script_[next_++];
    return ReachGoal{};
}

std::unique_ptr<GuidanceProvider> scripted_guidance(std::vector<HighLevelAction> script) {
    return std::make_unique<ScriptedGuidance>(std::move(script));
}

Json script_to_json(const std::vector<HighLevelAction>& script) {
    Json j = Json::array();
    for (const auto& a : script) j.push_back(action_to_json(a));
    return j;
}

std::vector<HighLevelAction> script_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("script must be a JSON array");
    std::vector<HighLevelAction> out;
    for (const auto& a : j) out.push_back(action_from_json(a));
    return out;
}

// ---------------------------------------------------------------------------
// Approach states

std::vector<Pose2> ApproachStates::poses() const {
    std::vector<Pose2> out;
    if (side) out.push_back(*side);
    if (forward) out.push_back(*forward);
    return out;
}

namespace {

double nearest_wall_distance(const Scene& scene, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : scene.walls()) best = std::min(best, distance_to_shape(w.shape, w.pose, p));
    return best;
}

}  // namespace

ApproachStates compute_approach_states(const Scene& scene, const SystemState& state, std::size_t object,
                                       const Vec2& centroid, double clearance) {
    if (object >= state.objects.size()) throw ContractViolation("approach target object does not exist");
    const Vec2 c = state.objects[object].position();
    const Vec2 delta = c - centroid;
    const double len = norm(delta);
    if (len < kTouchEpsilon) throw ContractViolation("target centroid coincides with the object centroid");
    const Vec2 u = delta / len;
    const double R = min_enclosing_circle(scene.objects()[object].shape, state.objects[object]).radius;
    const double standoff = R + scene.robot().mouth_depth() + clearance;

    auto facing = [&](const Vec2& dir) {
        const Vec2 p = c + dir * standoff;
        return Pose2(p.x, p.y, std::atan2(-dir.y, -dir.x));
    };
    auto valid = [&](const Pose2& pose) {
        SystemState probe = state;
        probe.robot = pose;
        return is_valid(scene, probe);
    };

    ApproachStates out;
    if (const Pose2 fwd = facing(u); valid(fwd)) out.forward = fwd;

    const Pose2 plus = facing(perp(u));
    const Pose2 minus = facing(-perp(u));
    const bool plus_ok = valid(plus);
    const bool minus_ok = valid(minus);
    if (plus_ok && minus_ok) {
        const double dp = nearest_wall_distance(scene, plus.position());
        const double dm = nearest_wall_distance(scene, minus.position());
        out.side = dm > dp ? minus : plus;
    } else if (plus_ok) {
        out.side = plus;
    } else if (minus_ok) {
        out.side = minus;
    }
    if (!out.side && !out.forward) throw ApproachInfeasible("no valid approach pose for object");
    return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Phase p) {
    switch (p) {
        case Phase::awaiting_action: return "awaiting_action";
        case Phase::planning_approach: return "planning_approach";
        case Phase::planning_push: return "planning_push";
        case Phase::executing: return "executing";
        case Phase::planning_reach: return "planning_reach";
        case Phase::done_success: return "done_success";
        case Phase::done_failure: return "done_failure";
    }
    return "unknown";
}

std::string to_string(SegmentStatus s) {
    switch (s) {
        case SegmentStatus::executed: return "executed";
        case SegmentStatus::invalid_action: return "invalid_action";
        case SegmentStatus::approach_infeasible: return "approach_infeasible";
        case SegmentStatus::approach_failed: return "approach_failed";
        case SegmentStatus::push_failed: return "push_failed";
        case SegmentStatus::out_of_budget: return "out_of_budget";
    }
    return "unknown";
}

namespace {

Json result_to_json(const std::optional<PlanResult>& r) {
    if (!r) return nullptr;
    return Json{{"status", to_string(r->status)},
                {"planning_time", r->planning_time},
                {"iterations", r->iterations},
                {"motions", r->motions},
                {"plan", plan_to_json(r->plan)}};
}

}  // namespace

Json log_to_json(const ExecutionLog& log) {
    Json segments = Json::array();
    for (const auto& s : log.segments) {
        segments.push_back({{"action", action_to_json(s.action)},
                            {"status", to_string(s.status)},
                            {"approach", result_to_json(s.approach)},
                            {"push", result_to_json(s.push)},
                            {"start_state", state_to_json(s.start_state)},
                            {"end_state", state_to_json(s.end_state)}});
    }
    return Json{{"success", log.success},
                {"failure_reason", log.failure_reason},
                {"proposed_actions", log.proposed_actions},
                {"successful_actions", log.successful_actions},
                {"planning_time", log.planning_time},
                {"guidance_time", log.guidance_time},
                {"elapsed", log.elapsed},
                {"initial_state", state_to_json(log.initial_state)},
                {"segments", std::move(segments)},
                {"reach_proposed", log.reach_proposed},
                {"reach", result_to_json(log.reach)},
                {"final_state", state_to_json(log.final_state)}};
}

// ---------------------------------------------------------------------------
// Runner

GrtcRunner::GrtcRunner(const Scene& scene, SystemState q0, GrtcConfig gcfg, PlannerConfig pcfg, PlannerKind planner,
                       Clock& clock, GrtcObserver* observer)
    : scene_(scene),
      gcfg_(gcfg),
      pcfg_(pcfg),
      planner_(planner),
      clock_(&clock),
      observer_(observer),
      q_current_(std::move(q0)),
      t0_(clock.now()) {
    gcfg_.validate();
    pcfg_.validate();
    if (!is_valid(scene_, q_current_)) throw ContractViolation("grtc start state is invalid");
    log_.initial_state = q_current_;
    log_.final_state = q_current_;
}

GrtcRunner GrtcRunner::fork(Clock& clock, std::uint64_t seed) const {
    GrtcRunner copy = *this;
    copy.clock_ = &clock;
    copy.observer_ = nullptr;
    copy.t0_ = clock.now();
    copy.excluded_ = -elapsed();
    copy.gcfg_.seed = seed;
    copy.calls_ = 0;
    return copy;
}

double GrtcRunner::elapsed() const { return clock_->now() - t0_ - excluded_; }

double GrtcRunner::remaining() const { return gcfg_.t_overall - elapsed(); }

void GrtcRunner::record_guidance(double seconds, bool counts_against_budget) {
    log_.guidance_time += seconds;
    if (!counts_against_budget) excluded_ += seconds;
}

PlanResult GrtcRunner::plan_call(const SystemState& start, const GoalSpec& goal, double budget) {
    PlannerConfig cfg = pcfg_;
    cfg.time_limit = budget;
    cfg.seed = derive_seed(gcfg_.seed, calls_++);
    PlanResult r = plan(planner_, scene_, start, goal, cfg, *clock_);
    log_.planning_time += r.planning_time;
    return r;
}

SystemState GrtcRunner::execute(const Plan& plan) {
    SystemState s = plan.states.front();
    for (const auto& u : plan.controls) {
        auto r = propagate(scene_, s, u, pcfg_.physics);
        if (!r.valid) throw ContractViolation("plan execution diverged from its planned validity");
        s = std::move(r.state);
        if (observer_) observer_->on_state(s);
    }
    return s;
}

const PushSegment& GrtcRunner::run_push(const PushAction& action) {
    if (finished_) throw ContractViolation("run already finished");
    ++log_.proposed_actions;
    PushSegment seg;
    seg.action = action;
    seg.start_state = q_current_;
    seg.end_state = q_current_;

    auto close = [&](SegmentStatus status) -> const PushSegment& {
        seg.status = status;
        log_.segments.push_back(std::move(seg));
        if (observer_) observer_->on_counters(log_);
        return log_.segments.back();
    };

    if (check_push_action(scene_, action)) return close(SegmentStatus::invalid_action);
    const std::size_t obj = *scene_.find_object(action.object_id);

    ApproachStates approach;
    try {
        approach = compute_approach_states(scene_, q_current_, obj, action.centroid, gcfg_.approach_clearance);
    } catch (const ApproachInfeasible&) {
        return close(SegmentStatus::approach_infeasible);
    } catch (const ContractViolation&) {
        // The object already sits on the commanded centroid.
        return close(SegmentStatus::invalid_action);
    }

    if (remaining() <= 0) return close(SegmentStatus::out_of_budget);
    if (observer_) observer_->on_phase(Phase::planning_approach);
    seg.approach = plan_call(q_current_, RobotPoses{approach.poses()}, std::min(gcfg_.t_pushing, remaining()));
    if (!seg.approach->solved()) return close(SegmentStatus::approach_failed);
    if (observer_) observer_->on_plan("approach", seg.approach->plan);

    if (remaining() <= 0) return close(SegmentStatus::out_of_budget);
    if (observer_) observer_->on_phase(Phase::planning_push);
    const GoalSpec push_goal = ObjectToRegion{obj, action.centroid, gcfg_.region_diameter};
    seg.push = plan_call(seg.approach->plan.states.back(), push_goal, std::min(gcfg_.t_pushing, remaining()));
    if (!seg.push->solved()) return close(SegmentStatus::push_failed);
    if (observer_) observer_->on_plan("push", seg.push->plan);

    if (observer_) observer_->on_phase(Phase::executing);
    execute(seg.approach->plan);
    q_current_ = execute(seg.push->plan);
    seg.end_state = q_current_;
    log_.final_state = q_current_;
    ++log_.successful_actions;
    return close(SegmentStatus::executed);
}

const ExecutionLog& GrtcRunner::run_reach() {
    if (finished_) throw ContractViolation("run already finished");
    ++log_.proposed_actions;
    log_.reach_proposed = true;
    if (remaining() <= 0) return abort("overall budget exhausted before reaching");
    if (observer_) observer_->on_phase(Phase::planning_reach);
    log_.reach = plan_call(q_current_, ReachGoalObject{}, remaining());
    if (!log_.reach->solved()) return abort("reach planning failed: " + to_string(log_.reach->status));
    if (observer_) {
        observer_->on_plan("reach", log_.reach->plan);
        observer_->on_phase(Phase::executing);
    }
    q_current_ = execute(log_.reach->plan);
    log_.final_state = q_current_;
    log_.success = grasp_achieved(scene_, q_current_);
    if (!log_.success) log_.failure_reason = "reach plan did not achieve the grasp";
    finish();
    return log_;
}

const ExecutionLog& GrtcRunner::abort(const std::string& reason) {
    if (finished_) return log_;
    log_.success = false;
    log_.failure_reason = reason;
    finish();
    return log_;
}

void GrtcRunner::finish() {
    finished_ = true;
    log_.elapsed = elapsed();
    log_.final_state = q_current_;
    if (observer_) {
        observer_->on_counters(log_);
        observer_->on_phase(log_.success ? Phase::done_success : Phase::done_failure);
    }
}

bool run_guidance(GrtcRunner& runner, GuidanceProvider& guidance, Clock& clock) {
    for (;;) {
        if (runner.remaining() <= 0) {
            runner.abort("overall budget exhausted");
            return false;
        }
        HighLevelAction action;
        const double g0 = clock.now();
        try {
            action = guidance.next_high_level_action(runner.current());
        } catch (const std::exception& e) {
            runner.record_guidance(clock.now() - g0, guidance.counts_against_budget());
            runner.abort(std::string("guidance failure: ") + e.what());
            return false;
        }
        runner.record_guidance(clock.now() - g0, guidance.counts_against_budget());

        const auto* push = std::get_if<PushAction>(&action);
        // Selecting the goal object means "reach", as in the operator console.
        if (!push || runner.scene().find_object(push->object_id) == runner.scene().goal_index()) return true;
        runner.run_push(*push);
    }
}

ExecutionLog grtc_run(const Scene& scene, const SystemState& q0, GuidanceProvider& guidance, const GrtcConfig& gcfg,
                      const PlannerConfig& pcfg, PlannerKind planner, Clock& clock) {
    GrtcRunner runner(scene, q0, gcfg, pcfg, planner, clock);
    if (!run_guidance(runner, guidance, clock)) return runner.log();
    return runner.run_reach();
}

ExecutionLog grtc_run(const Scene& scene, const SystemState& q0, GuidanceProvider& guidance, const GrtcConfig& gcfg,
                      const PlannerConfig& pcfg, PlannerKind planner) {
    WallClock clock;
    return grtc_run(scene, q0, guidance, gcfg, pcfg, planner, clock);
}

}  // namespace rtc
