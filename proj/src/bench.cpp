#include "rtc/bench.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "rtc/heuristic.hpp"
#include "rtc/random.hpp"

namespace rtc {

std::string to_string(Approach a) {
    switch (a) {
        case Approach::rrt: return "rrt";
        case Approach::kpiece: return "kpiece";
        case Approach::grtc_heuristic: return "grtc-heuristic";
        case Approach::grtc_scripted: return "grtc-scripted";
        case Approach::grtc_hitl: return "grtc-hitl";
    }
    return "unknown";
}

Approach approach_from_string(const std::string& s) {
    for (const Approach a : {Approach::rrt, Approach::kpiece, Approach::grtc_heuristic, Approach::grtc_scripted,
                             Approach::grtc_hitl}) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown approach '" + s + "'");
}

BenchScene load_bench_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scene file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    const std::filesystem::path p(path);
    BenchScene out{p.stem().string(), scene_from_json(j), propagation_config_from_json(j), std::nullopt};
    const auto script_path = p.parent_path() / (p.stem().string() + ".script.json");
    if (std::filesystem::exists(script_path)) {
        std::ifstream sin(script_path);
        out.script = script_from_json(Json::parse(sin));
    }
    return out;
}

std::vector<BenchScene> load_bench_scenes(const std::vector<std::string>& patterns) {
    std::vector<std::string> paths;
    for (const auto& pattern : patterns) {
        glob_t g{};
        if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) {
                const std::string path = g.gl_pathv[i];
                // Sidecar scripts share the directory but are not scenes.
                if (path.size() < 12 || path.compare(path.size() - 12, 12, ".script.json") != 0) {
                    paths.push_back(path);
                }
            }
        }
        globfree(&g);
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    std::vector<BenchScene> scenes;
    for (const auto& path : paths) scenes.push_back(load_bench_scene(path));
    return scenes;
}

namespace {

std::unique_ptr<Clock> make_clock(const BenchOptions& opts) {
    if (opts.clock == ClockKind::work) return std::make_unique<WorkClock>(opts.work_costs);
    return std::make_unique<WallClock>();
}

TrialRecord record_from_log(const ExecutionLog& log) {
    TrialRecord r;
    r.success = log.success;
    r.planning_time = log.planning_time;
    r.guidance_time = log.guidance_time;
    r.proposed_actions = log.proposed_actions;
    r.successful_actions = log.successful_actions;
    return r;
}

/// Operator interaction for grtc-scripted, done once per scene and shared by
/// every reach trial.
struct ScriptedPhase {
    std::once_flag once;
    std::unique_ptr<Clock> clock;
    std::optional<GrtcRunner> runner;
    bool reach_requested{false};
    std::string error;
};

class TrialRunner {
public:
    TrialRunner(const std::vector<BenchScene>& scenes, const BenchOptions& opts) : scenes_(scenes), opts_(opts) {
        phases_.reserve(scenes.size());
        for (std::size_t i = 0; i < scenes.size(); ++i) phases_.push_back(std::make_unique<ScriptedPhase>());
    }

    TrialOutcome run(std::size_t scene, Approach approach, std::size_t trial) {
        const BenchScene& bs = scenes_[scene];
        TrialOutcome out;
        const std::uint64_t seed = opts_.base_seed + trial;
        try {
            out = dispatch(scene, approach, seed);
        } catch (const std::exception&) {
            // A crashing trial counts as a failure and never aborts the sweep.
            out = TrialOutcome{};
        }
        out.record.scene_id = bs.id;
        out.record.approach = approach;
        out.record.seed = seed;
        return out;
    }

private:
    PlannerConfig planner_config(const BenchScene& bs) const {
        PlannerConfig cfg = opts_.pcfg;
        cfg.physics = bs.physics;
        return cfg;
    }

    TrialOutcome dispatch(std::size_t scene, Approach approach, std::uint64_t seed) {
        const BenchScene& bs = scenes_[scene];
        const auto clock = make_clock(opts_);
        PlannerConfig cfg = planner_config(bs);
        GrtcConfig gcfg = opts_.gcfg;
        gcfg.seed = seed;
        TrialOutcome out;
        switch (approach) {
            case Approach::rrt:
            case Approach::kpiece: {
                // Same seed derivation as a guided run's first planning call.
                cfg.time_limit = opts_.gcfg.t_overall;
                cfg.seed = derive_seed(seed, 0);
                const auto kind = approach == Approach::rrt ? PlannerKind::rrt : PlannerKind::kpiece;
                const PlanResult r = plan(kind, bs.scene, bs.scene.initial_state(), ReachGoalObject{}, cfg, *clock);
                out.record.success = r.solved() && grasp_achieved(bs.scene, r.plan.states.back());
                out.record.planning_time = r.planning_time;
                return out;
            }
            case Approach::grtc_heuristic: {
                HeuristicGuidance guidance(bs.scene, derive_seed(seed, 0x6875), clock.get());
                out.log = grtc_run(bs.scene, bs.scene.initial_state(), guidance, gcfg, cfg, opts_.grtc_planner, *clock);
                break;
            }
            case Approach::grtc_scripted: {
                ScriptedPhase& phase = scripted_phase(scene);
                if (!phase.error.empty()) throw std::runtime_error(phase.error);
                GrtcRunner runner = phase.runner->fork(*clock, seed);
                out.log = phase.reach_requested ? runner.run_reach() : runner.log();
                break;
            }
            case Approach::grtc_hitl:
                throw std::invalid_argument("grtc-hitl needs a live operator; use the interactive service");
        }
        out.record = record_from_log(*out.log);
        return out;
    }

    ScriptedPhase& scripted_phase(std::size_t scene) {
        ScriptedPhase& phase = *phases_[scene];
        std::call_once(phase.once, [&] {
            const BenchScene& bs = scenes_[scene];
            try {
                phase.clock = make_clock(opts_);
                GrtcConfig gcfg = opts_.gcfg;
                gcfg.seed = opts_.base_seed;
                const auto script = bs.script ? *bs.script : oracle_script(bs.scene, bs.scene.initial_state(),
                                                                           gcfg.region_diameter);
                phase.runner.emplace(bs.scene, bs.scene.initial_state(), gcfg, planner_config(bs), opts_.grtc_planner,
                                     *phase.clock);
                ScriptedGuidance guidance(script);
                phase.reach_requested = run_guidance(*phase.runner, guidance, *phase.clock);
            } catch (const std::exception& e) {
                phase.error = e.what();
            }
        });
        return phase;
    }

    const std::vector<BenchScene>& scenes_;
    const BenchOptions& opts_;
    std::vector<std::unique_ptr<ScriptedPhase>> phases_;
};

}  // namespace

std::vector<TrialRecord> run_benchmark(const std::vector<BenchScene>& scenes, const std::vector<Approach>& approaches,
                                       const BenchOptions& opts,
                                       const std::function<void(const TrialOutcome&)>& sink) {
    if (opts.trials < 1) throw ContractViolation("trials_per_scene must be at least 1");
    opts.gcfg.validate();
    for (const Approach a : approaches) {
        if (a == Approach::grtc_hitl) throw std::invalid_argument("grtc-hitl cannot run headless");
    }

    struct Job {
        std::size_t scene;
        Approach approach;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        for (const Approach a : approaches) {
            for (std::size_t t = 0; t < opts.trials; ++t) jobs.push_back({s, a, t});
        }
    }

    TrialRunner runner(scenes, opts);
    std::vector<std::optional<TrialOutcome>> results(jobs.size());
    std::mutex mu;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            TrialOutcome o = runner.run(jobs[k].scene, jobs[k].approach, jobs[k].trial);
            {
                std::lock_guard lock(mu);
                results[k] = std::move(o);
            }
            ready.notify_all();
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.threads, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);

    std::vector<TrialRecord> records;
    records.reserve(jobs.size());
    auto deliver = [&](const TrialOutcome& o) {
        if (sink) sink(o);
        records.push_back(o.record);
    };
    if (n_threads == 1) {
        // Inline so records stream out as each trial finishes.
        for (const Job& j : jobs) deliver(runner.run(j.scene, j.approach, j.trial));
    } else {
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            std::unique_lock lock(mu);
            ready.wait(lock, [&] { return results[k].has_value(); });
            const TrialOutcome o = std::move(*results[k]);
            results[k].reset();
            lock.unlock();
            deliver(o);
        }
    }
    for (auto& t : pool) t.join();
    return records;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::string to_csv_row(const TrialRecord& r) {
    if (r.scene_id.find_first_of(",\n\"") != std::string::npos) {
        throw std::invalid_argument("scene id must not contain commas, quotes or newlines");
    }
    return r.scene_id + "," + to_string(r.approach) + "," + std::to_string(r.seed) + "," +
           (r.success ? "true" : "false") + "," + format_double(r.planning_time) + "," +
           format_double(r.guidance_time) + "," + std::to_string(r.proposed_actions) + "," +
           std::to_string(r.successful_actions);
}

TrialRecord from_csv_row(const std::string& line) {
    const auto f = split(line, ',');
    if (f.size() != 8) throw std::invalid_argument("expected 8 CSV fields, got " + std::to_string(f.size()));
    TrialRecord r;
    try {
        r.scene_id = f[0];
        r.approach = approach_from_string(f[1]);
        r.seed = std::stoull(f[2]);
        if (f[3] == "true" || f[3] == "1") {
            r.success = true;
        } else if (f[3] == "false" || f[3] == "0") {
            r.success = false;
        } else {
            throw std::invalid_argument("bad success value '" + f[3] + "'");
        }
        r.planning_time = std::stod(f[4]);
        r.guidance_time = std::stod(f[5]);
        r.proposed_actions = std::stoull(f[6]);
        r.successful_actions = std::stoull(f[7]);
    } catch (const std::logic_error& e) {
        throw std::invalid_argument("malformed CSV row '" + line + "': " + e.what());
    }
    return r;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
}

std::vector<TrialRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("missing or wrong CSV header");
    std::vector<TrialRecord> out;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(from_csv_row(line));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics

MetricStats describe(const std::vector<double>& values) {
    if (values.empty()) throw ContractViolation("cannot describe an empty sample");
    MetricStats s;
    const double n = static_cast<double>(values.size());
    // Sort first so the result does not depend on record order.
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (const double x : v) sum += x;
    s.mean = sum / n;
    if (v.size() > 1) {
        double ss = 0;
        for (const double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / (n - 1));
        s.ci95 = 1.96 * s.stddev / std::sqrt(n);
    }
    return s;
}

namespace {

GroupStats group_stats(const std::string& scene_id, Approach approach, const std::vector<const TrialRecord*>& rs) {
    GroupStats g;
    g.scene_id = scene_id;
    g.approach = approach;
    g.trials = rs.size();
    std::vector<double> pt, gt, pa, sa;
    std::size_t ok = 0;
    for (const auto* r : rs) {
        ok += r->success ? 1 : 0;
        pt.push_back(r->planning_time);
        gt.push_back(r->guidance_time);
        pa.push_back(static_cast<double>(r->proposed_actions));
        sa.push_back(static_cast<double>(r->successful_actions));
    }
    g.success_rate = static_cast<double>(ok) / static_cast<double>(rs.size());
    g.planning_time = describe(pt);
    g.guidance_time = describe(gt);
    g.proposed_actions = describe(pa);
    g.successful_actions = describe(sa);
    return g;
}

Json metric_json(const MetricStats& m) { return Json{{"mean", m.mean}, {"std", m.stddev}, {"ci95", m.ci95}}; }

Json group_json(const GroupStats& g) {
    return Json{{"scene_id", g.scene_id},
                {"approach", to_string(g.approach)},
                {"trials", g.trials},
                {"success_rate", g.success_rate},
                {"planning_time", metric_json(g.planning_time)},
                {"guidance_time", metric_json(g.guidance_time)},
                {"proposed_actions", metric_json(g.proposed_actions)},
                {"successful_actions", metric_json(g.successful_actions)}};
}

}  // namespace

BenchStats summarize(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw ContractViolation("cannot summarize an empty record list");
    std::map<std::pair<std::string, Approach>, std::vector<const TrialRecord*>> per_scene;
    std::map<Approach, std::vector<const TrialRecord*>> overall;
    for (const auto& r : records) {
        per_scene[{r.scene_id, r.approach}].push_back(&r);
        overall[r.approach].push_back(&r);
    }
    BenchStats s;
    for (const auto& [key, rs] : per_scene) s.per_scene.push_back(group_stats(key.first, key.second, rs));
    for (const auto& [a, rs] : overall) s.overall.push_back(group_stats("*", a, rs));
    return s;
}

Json stats_to_json(const BenchStats& stats) {
    Json per_scene = Json::array();
    for (const auto& g : stats.per_scene) per_scene.push_back(group_json(g));
    Json overall = Json::array();
    for (const auto& g : stats.overall) overall.push_back(group_json(g));
    return Json{{"per_scene", std::move(per_scene)}, {"overall", std::move(overall)}};
}

}  // namespace rtc
