// bench: run benchmark sweeps, summarise results, generate scene sets.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rtc/bench.hpp"
#include "rtc/scenegen.hpp"

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::size_t start = 0;
        while (start <= item.size()) {
            const std::size_t end = std::min(item.find(',', start), item.size());
            if (end > start) out.push_back(item.substr(start, end - start));
            start = end + 1;
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reaching-through-clutter benchmark harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run approaches over scenes and stream trial records to CSV");
    std::vector<std::string> scene_patterns;
    std::vector<std::string> approach_names;
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    double t_overall = 300.0;
    double t_pushing = 10.0;
    double region_diameter = 0.08;
    std::string out_path;
    std::string clock_name = "wall";
    std::string planner_name = "rrt";
    std::size_t threads = 1;
    run->add_option("--scenes", scene_patterns, "Scene file glob(s)")->required();
    run->add_option("--approach", approach_names, "rrt, kpiece, grtc-heuristic, grtc-scripted (repeat or comma-separate)")
        ->required();
    run->add_option("--trials", trials, "Trials per scene and approach")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed; trial k uses seed + k");
    run->add_option("--t-overall", t_overall, "Overall budget per run (s)")->check(CLI::PositiveNumber);
    run->add_option("--t-pushing", t_pushing, "Budget per approach or push planning call (s)")
        ->check(CLI::PositiveNumber);
    run->add_option("--region-diameter", region_diameter, "Push target region diameter (m)")
        ->check(CLI::PositiveNumber);
    run->add_option("--planner", planner_name, "Low-level planner for guided approaches")
        ->check(CLI::IsMember({"rrt", "kpiece"}));
    run->add_option("--clock", clock_name, "wall: real time; work: deterministic work-unit time")
        ->check(CLI::IsMember({"wall", "work"}));
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out_path, "Output CSV")->required();

    // summarize
    auto* summ = app.add_subcommand("summarize", "Per-scene and overall statistics from a results CSV");
    std::string in_path;
    std::string stats_path;
    summ->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
    summ->add_option("--out", stats_path, "Statistics JSON")->required();

    // gen-scenes
    auto* gen = app.add_subcommand("gen-scenes", "Generate random scenes S1..Sn");
    std::size_t n_scenes = 10;
    rtc::SceneGenParams params;
    std::string out_dir;
    gen->add_option("--n", n_scenes, "Number of scenes")->check(CLI::PositiveNumber);
    gen->add_option("--objects", params.n_objects, "Objects per scene, goal included")->check(CLI::PositiveNumber);
    gen->add_option("--seed", params.seed, "Seed; scene k uses a seed derived from it");
    gen->add_option("--goal-min-depth", params.goal_min_depth, "Lowest goal y as a fraction of shelf depth")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--out", out_dir, "Output directory")->required();
    bool fixtures = false;
    gen->add_flag("--fixtures", fixtures, "Also write the hand-built S-empty and S-blocked scenes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            rtc::BenchOptions opts;
            opts.trials = trials;
            opts.base_seed = seed;
            opts.gcfg.t_overall = t_overall;
            opts.gcfg.t_pushing = t_pushing;
            opts.gcfg.region_diameter = region_diameter;
            opts.grtc_planner = rtc::planner_kind_from_string(planner_name);
            opts.clock = clock_name == "work" ? rtc::ClockKind::work : rtc::ClockKind::wall;
            opts.threads = threads;
            std::vector<rtc::Approach> approaches;
            for (const auto& name : split_list(approach_names)) approaches.push_back(rtc::approach_from_string(name));
            const auto scenes = rtc::load_bench_scenes(scene_patterns);
            if (scenes.empty()) throw std::invalid_argument("no scene files matched");

            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            out << rtc::kCsvHeader << '\n' << std::flush;
            rtc::run_benchmark(scenes, approaches, opts, [&](const rtc::TrialOutcome& o) {
                out << rtc::to_csv_row(o.record) << '\n' << std::flush;
                std::cerr << o.record.scene_id << ' ' << rtc::to_string(o.record.approach) << " seed "
                          << o.record.seed << (o.record.success ? " ok" : " fail") << '\n';
            });
        } else if (*summ) {
            std::ifstream in(in_path);
            const auto records = rtc::read_csv(in);
            std::ofstream out(stats_path);
            if (!out) throw std::runtime_error("cannot write " + stats_path);
            out << rtc::stats_to_json(rtc::summarize(records)).dump(2) << '\n';
        } else if (*gen) {
            std::filesystem::create_directories(out_dir);
            const std::uint64_t base = params.seed;
            for (std::size_t k = 1; k <= n_scenes; ++k) {
                params.seed = rtc::derive_seed(base, k);
                const rtc::Scene scene = rtc::generate_scene(params);
                const auto path = std::filesystem::path(out_dir) / ("S" + std::to_string(k) + ".json");
                rtc::save_scene(scene, path.string());
                std::cout << path.string() << '\n';
            }
            if (fixtures) {
                for (const auto& [name, scene] : {std::pair{"S-empty", rtc::make_empty_scene()},
                                                  std::pair{"S-blocked", rtc::make_blocked_scene()}}) {
                    const auto path = std::filesystem::path(out_dir) / (std::string(name) + ".json");
                    rtc::save_scene(scene, path.string());
                    std::cout << path.string() << '\n';
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
