// Benchmark harness: runs baseline and guided approaches over a scene set,
// streams one record per trial, and summarises success rates and timings.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rtc/grtc.hpp"

namespace rtc {

enum class Approach { rrt, kpiece, grtc_heuristic, grtc_scripted, grtc_hitl };

std::string to_string(Approach a);
Approach approach_from_string(const std::string& s);

struct TrialRecord {
    std::string scene_id;
    Approach approach{Approach::rrt};
    std::uint64_t seed{0};
    bool success{false};
    double planning_time{0};
    double guidance_time{0};
    std::size_t proposed_actions{0};
    std::size_t successful_actions{0};

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct BenchScene {
    std::string id;
    Scene scene;
    PropagationConfig physics;
    /// Operator script for grtc-scripted; computed by oracle_script when absent.
    std::optional<std::vector<HighLevelAction>> script;
};

/// Loads a scene file; a sibling `<stem>.script.json` supplies the script.
BenchScene load_bench_scene(const std::string& path);

/// Expands shell-style patterns and loads the matches in sorted order.
std::vector<BenchScene> load_bench_scenes(const std::vector<std::string>& patterns);

enum class ClockKind { wall, work };

struct BenchOptions {
    std::size_t trials{10};
    std::uint64_t base_seed{0};
    GrtcConfig gcfg{};
    PlannerConfig pcfg{};
    /// Low-level planner inside the guided approaches.
    PlannerKind grtc_planner{PlannerKind::rrt};
    ClockKind clock{ClockKind::wall};
    WorkCosts work_costs{};
    std::size_t threads{1};
};

struct TrialOutcome {
    TrialRecord record;
    /// Execution log of guided approaches.
    std::optional<ExecutionLog> log;
};

/// Runs every (scene, approach, trial) combination. `sink` receives outcomes
/// in (scene, approach, trial) order regardless of worker scheduling.
/// Trial failures are recorded as unsuccessful trials, never thrown.
std::vector<TrialRecord> run_benchmark(const std::vector<BenchScene>& scenes, const std::vector<Approach>& approaches,
                                       const BenchOptions& opts,
                                       const std::function<void(const TrialOutcome&)>& sink = {});

inline constexpr const char* kCsvHeader =
    "scene_id,approach,seed,success,planning_time,guidance_time,proposed_actions,successful_actions";

std::string to_csv_row(const TrialRecord& r);
TrialRecord from_csv_row(const std::string& line);
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(std::istream& in);

struct MetricStats {
    double mean{0};
    double stddev{0};
    double ci95{0};
};

/// Sample mean, sample standard deviation (n - 1) and 1.96 sigma / sqrt(n).
MetricStats describe(const std::vector<double>& values);

struct GroupStats {
    std::string scene_id;
    Approach approach{Approach::rrt};
    std::size_t trials{0};
    double success_rate{0};
    MetricStats planning_time;
    MetricStats guidance_time;
    MetricStats proposed_actions;
    MetricStats successful_actions;
};

struct BenchStats {
    /// One entry per (scene, approach), sorted.
    std::vector<GroupStats> per_scene;
    /// One entry per approach over all scenes; scene_id is "*".
    std::vector<GroupStats> overall;
};

BenchStats summarize(const std::vector<TrialRecord>& records);
Json stats_to_json(const BenchStats& stats);

}  // namespace rtc
