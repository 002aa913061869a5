#include "rtc/hitl_service.hpp"

#include <httplib.h>

#include "rtc/physics.hpp"

namespace rtc {

std::variant<HighLevelAction, std::string> resolve_clicks(const Scene& scene, const SystemState& state,
                                                          const Vec2& first, const std::optional<Vec2>& second) {
    // The goal wins ties so that clicking it always means "reach".
    std::optional<std::size_t> hit;
    if (point_in_shape(scene.goal().shape, state.objects[scene.goal_index()], first)) hit = scene.goal_index();
    for (std::size_t i = 0; i < state.objects.size() && !hit; ++i) {
        if (point_in_shape(scene.objects()[i].shape, state.objects[i], first)) hit = i;
    }
    if (!hit) return std::string("no object under the first click");
    if (*hit == scene.goal_index()) return HighLevelAction{ReachGoal{}};
    if (!second) return std::string("a region centroid (second click) is required to push");
    return HighLevelAction{PushAction{scene.objects()[*hit].id, *second}};
}

namespace {

bool terminal(Phase p) { return p == Phase::done_success || p == Phase::done_failure; }

Json plan_event(const std::string& kind, const Plan& plan) {
    Json j = plan_to_json(plan);
    j["kind"] = kind;
    return j;
}

Vec2 point_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("click must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Session::Session(std::string id, Scene scene, const ServiceConfig& cfg)
    : id_(std::move(id)), scene_(std::move(scene)), cfg_(cfg), q_view_(scene_.initial_state()) {
    if (!is_valid(scene_, scene_.initial_state())) throw std::invalid_argument("scene initial state is invalid");
    try {
        runner_ = std::make_unique<GrtcRunner>(scene_, scene_.initial_state(), cfg_.gcfg, cfg_.pcfg, cfg_.planner,
                                               clock_, this);
    } catch (const ContractViolation& e) {
        throw std::invalid_argument(e.what());
    }
    log_view_ = runner_->log();
    awaiting_since_ = clock_.now();
}

Session::~Session() { join_worker(); }

void Session::join_worker() {
    if (worker_.joinable()) worker_.join();
}

Submission Session::submit(const Json& body) {
    HighLevelAction action;
    try {
        if (body.is_object() && body.value("type", "") == "clicks") {
            std::optional<Vec2> second;
            if (body.contains("second") && !body.at("second").is_null()) second = point_from_json(body.at("second"));
            SystemState state;
            {
                std::lock_guard lock(mu_);
                state = q_view_;
            }
            auto resolved = resolve_clicks(scene_, state, point_from_json(body.at("first")), second);
            if (auto* reason = std::get_if<std::string>(&resolved)) return {false, *reason, false};
            action = std::get<HighLevelAction>(resolved);
        } else {
            action = action_from_json(body);
        }
    } catch (const std::exception& e) {
        return {false, e.what(), false};
    }
    return submit(action);
}

Submission Session::submit(const HighLevelAction& action) {
    {
        std::lock_guard lock(mu_);
        if (phase_ != Phase::awaiting_action) {
            return {false, "session is " + to_string(phase_) + ", not awaiting an action", true};
        }
        if (const auto* push = std::get_if<PushAction>(&action)) {
            if (auto reason = check_push_action(scene_, *push)) return {false, *reason, false};
        }
        // No pipeline is running, so the runner may be touched here.
        runner_->record_guidance(clock_.now() - awaiting_since_, cfg_.budget_includes_human);
        phase_ = std::holds_alternative<PushAction>(action) ? Phase::planning_approach : Phase::planning_reach;
    }
    join_worker();
    worker_ = std::thread([this, action] { run_pipeline(action); });
    return {true, "", false};
}

void Session::run_pipeline(HighLevelAction action) {
    try {
        if (runner_->remaining() <= 0) {
            runner_->abort("session budget exhausted");
        } else if (const auto* push = std::get_if<PushAction>(&action)) {
            runner_->run_push(*push);
        } else {
            runner_->run_reach();
        }
    } catch (const std::exception& e) {
        runner_->abort(std::string("pipeline error: ") + e.what());
    }
    std::lock_guard lock(mu_);
    log_view_ = runner_->log();
    q_view_ = runner_->current();
    if (runner_->finished()) {
        phase_ = log_view_.success ? Phase::done_success : Phase::done_failure;
        emit("terminal", {{"phase", to_string(phase_)},
                          {"success", log_view_.success},
                          {"failure_reason", log_view_.failure_reason}});
    } else {
        phase_ = Phase::awaiting_action;
        awaiting_since_ = clock_.now();
        emit("phase_change", {{"phase", to_string(phase_)}});
    }
}

void Session::on_phase(Phase p) {
    std::lock_guard lock(mu_);
    phase_ = p;
    emit("phase_change", {{"phase", to_string(p)}});
}

void Session::on_plan(const std::string& kind, const Plan& plan) {
    std::lock_guard lock(mu_);
    emit("plan_segment", plan_event(kind, plan));
}

void Session::on_state(const SystemState& s) {
    std::lock_guard lock(mu_);
    q_view_ = s;
    emit("state_update", {{"state", state_to_json(s)}});
}

void Session::on_counters(const ExecutionLog& log) {
    std::lock_guard lock(mu_);
    log_view_ = log;
    emit("counters", counters_locked());
}

void Session::emit(const std::string& type, Json payload) {
    events_.push_back({{"seq", events_.size()}, {"type", type}, {"payload", std::move(payload)}});
    cv_.notify_all();
}

Json Session::counters_locked() const {
    return {{"proposed_actions", log_view_.proposed_actions},
            {"successful_actions", log_view_.successful_actions},
            {"planning_time", log_view_.planning_time},
            {"guidance_time", log_view_.guidance_time}};
}

Json Session::snapshot_locked() const {
    return {{"session_id", id_},
            {"phase", to_string(phase_)},
            {"state", state_to_json(q_view_)},
            {"counters", counters_locked()},
            {"budget",
             {{"t_overall", cfg_.gcfg.t_overall},
              {"t_pushing", cfg_.gcfg.t_pushing},
              {"region_diameter", cfg_.gcfg.region_diameter},
              {"budget_includes_human", cfg_.budget_includes_human}}}};
}

Phase Session::phase() const {
    std::lock_guard lock(mu_);
    return phase_;
}

Json Session::state_json() const {
    std::lock_guard lock(mu_);
    return snapshot_locked();
}

Json Session::log_json() const {
    std::lock_guard lock(mu_);
    Json j = log_to_json(log_view_);
    j["phase"] = to_string(phase_);
    return j;
}

ExecutionLog Session::log() const {
    std::lock_guard lock(mu_);
    return log_view_;
}

std::pair<Json, std::size_t> Session::subscribe() const {
    std::lock_guard lock(mu_);
    return {Json{{"type", "snapshot"}, {"payload", snapshot_locked()}}, events_.size()};
}

std::vector<Json> Session::events_since(std::size_t cursor, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return events_.size() > cursor; });
    if (cursor >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(cursor), events_.end()};
}

void Session::wait_idle() const {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return phase_ == Phase::awaiting_action || terminal(phase_); });
}

// ---------------------------------------------------------------------------

std::string SessionManager::create(const Json& scene_json) {
    Scene scene = scene_from_json(scene_json);
    ServiceConfig cfg = cfg_;
    cfg.pcfg.physics = propagation_config_from_json(scene_json);
    std::lock_guard lock(mu_);
    const std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, std::make_shared<Session>(id, std::move(scene), cfg));
    return id;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::string sse_frame(const Json& event) { return "data: " + event.dump() + "\n\n"; }

struct Subscription {
    std::shared_ptr<Session> session;
    Json snapshot;
    std::size_t cursor;
    bool snapshot_sent{false};
};

}  // namespace

void register_routes(httplib::Server& server, SessionManager& sessions) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    server.Post("/sessions", [&sessions](const httplib::Request& req, httplib::Response& res) {
        try {
            const std::string id = sessions.create(Json::parse(req.body));
            send_json(res, 200, {{"session_id", id}});
        } catch (const std::exception& e) {
            send_json(res, 400, {{"error", e.what()}});
        }
    });

    auto with_session = [&sessions](const httplib::Request& req, httplib::Response& res) {
        auto s = sessions.find(req.matches[1]);
        if (!s) send_json(res, 404, {{"error", "unknown session"}});
        return s;
    };

    server.Get(R"(/sessions/([^/]+)/state)", [with_session](const httplib::Request& req, httplib::Response& res) {
        if (auto s = with_session(req, res)) send_json(res, 200, s->state_json());
    });

    server.Get(R"(/sessions/([^/]+)/log)", [with_session](const httplib::Request& req, httplib::Response& res) {
        if (auto s = with_session(req, res)) send_json(res, 200, s->log_json());
    });

    server.Post(R"(/sessions/([^/]+)/action)", [with_session](const httplib::Request& req, httplib::Response& res) {
        auto s = with_session(req, res);
        if (!s) return;
        Json body;
        try {
            body = Json::parse(req.body);
        } catch (const std::exception& e) {
            send_json(res, 400, {{"accepted", false}, {"reason", std::string("malformed JSON: ") + e.what()}});
            return;
        }
        const Submission sub = s->submit(body);
        if (sub.accepted) {
            send_json(res, 202, {{"accepted", true}});
        } else {
            send_json(res, sub.wrong_phase ? 409 : 400, {{"accepted", false}, {"reason", sub.reason}});
        }
    });

    server.Get(R"(/sessions/([^/]+)/events)", [&sessions](const httplib::Request& req, httplib::Response& res) {
        auto session = sessions.find(req.matches[1]);
        if (!session) {
            res.status = 404;
            res.set_content(sse_frame({{"type", "error"}, {"payload", {{"error", "unknown session"}}}}),
                            "text/event-stream");
            return;
        }
        auto [snapshot, cursor] = session->subscribe();
        auto sub = std::make_shared<Subscription>(Subscription{session, std::move(snapshot), cursor});
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [sub](std::size_t, httplib::DataSink& sink) {
            auto write = [&sink](const std::string& s) { return sink.write(s.data(), s.size()); };
            if (!sub->snapshot_sent) {
                sub->snapshot_sent = true;
                if (!write(sse_frame(sub->snapshot))) return false;
                const std::string phase = sub->snapshot["payload"]["phase"];
                if (phase == "done_success" || phase == "done_failure") sink.done();
                return true;
            }
            const auto events = sub->session->events_since(sub->cursor, std::chrono::milliseconds(1000));
            if (events.empty()) return write(": keepalive\n\n");
            for (const auto& e : events) {
                ++sub->cursor;
                if (!write(sse_frame(e))) return false;
                if (e["type"] == "terminal") {
                    sink.done();
                    break;
                }
            }
            return true;
        });
    });
}

}  // namespace rtc
