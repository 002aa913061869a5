// Interactive guidance service: one session per operator, each owning a
// guided run that advances one high-level action at a time, with state
// published as an ordered event stream.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rtc/grtc.hpp"

namespace httplib {
class Server;
}

namespace rtc {

struct ServiceConfig {
    /// Whether operator think time is charged to t_overall.
    bool budget_includes_human{false};
    GrtcConfig gcfg{};
    PlannerConfig pcfg{};
    PlannerKind planner{PlannerKind::rrt};
};

/// Result of an action submission; `reason` is set on rejection.
struct Submission {
    bool accepted{false};
    std::string reason;
    /// True when the rejection is due to the session being busy or finished.
    bool wrong_phase{false};
};

/// Resolves console clicks: the object under `first` (hit-tested against the
/// current state) selects the action; the goal object means reach, any other
/// object needs `second` as the region centroid.
std::variant<HighLevelAction, std::string> resolve_clicks(const Scene& scene, const SystemState& state,
                                                          const Vec2& first, const std::optional<Vec2>& second);

class Session final : public GrtcObserver {
public:
    Session(std::string id, Scene scene, const ServiceConfig& cfg);
    ~Session() override;

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] const Scene& scene() const { return scene_; }

    /// Accepts {"type":"push",...}, {"type":"reach"} or
    /// {"type":"clicks","first":[x,y],"second":[x,y]}.
    Submission submit(const Json& body);
    Submission submit(const HighLevelAction& action);

    [[nodiscard]] Phase phase() const;
    [[nodiscard]] Json state_json() const;
    [[nodiscard]] Json log_json() const;
    /// Copy of the log as of the last completed action.
    [[nodiscard]] ExecutionLog log() const;

    /// Snapshot event plus the cursor of the next event after it.
    std::pair<Json, std::size_t> subscribe() const;
    /// Events from `cursor` on; waits up to `timeout` when none are pending.
    std::vector<Json> events_since(std::size_t cursor, std::chrono::milliseconds timeout) const;

    /// Blocks until the session is awaiting an action or finished.
    void wait_idle() const;

    // GrtcObserver
    void on_phase(Phase p) override;
    void on_plan(const std::string& kind, const Plan& plan) override;
    void on_state(const SystemState& s) override;
    void on_counters(const ExecutionLog& log) override;

private:
    void emit(const std::string& type, Json payload);
    Json snapshot_locked() const;
    Json counters_locked() const;
    void run_pipeline(HighLevelAction action);
    void join_worker();

    std::string id_;
    Scene scene_;
    ServiceConfig cfg_;
    WallClock clock_;
    std::unique_ptr<GrtcRunner> runner_;

    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    Phase phase_{Phase::awaiting_action};
    SystemState q_view_;
    ExecutionLog log_view_;
    std::vector<Json> events_;
    double awaiting_since_;
    std::thread worker_;
};

class SessionManager {
public:
    explicit SessionManager(ServiceConfig cfg = {}) : cfg_(std::move(cfg)) {}

    /// Throws std::invalid_argument on a malformed or invalid scene.
    std::string create(const Json& scene_json);
    [[nodiscard]] std::shared_ptr<Session> find(const std::string& id) const;
    [[nodiscard]] const ServiceConfig& config() const { return cfg_; }

private:
    ServiceConfig cfg_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_{1};
};

/// Installs the /sessions endpoints on `server`.
void register_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace rtc
