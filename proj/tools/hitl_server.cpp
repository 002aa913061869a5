// hitl_server: HTTP + server-sent-events backend for the operator console.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <iostream>

#include "rtc/hitl_service.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interactive guidance service"};
    rtc::ServiceConfig cfg;
    std::string host = "0.0.0.0";
    std::string planner = "rrt";
    app.add_option("--budget-includes-human", cfg.budget_includes_human,
                   "Charge operator think time to the overall budget (true|false)");
    app.add_option("--host", host, "Bind address");
    app.add_option("--t-overall", cfg.gcfg.t_overall, "Overall budget per session (s)")->check(CLI::PositiveNumber);
    app.add_option("--t-pushing", cfg.gcfg.t_pushing, "Budget per approach or push planning call (s)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.gcfg.seed, "Seed for the planning calls of every session");
    app.add_option("--planner", planner, "Low-level planner")->check(CLI::IsMember({"rrt", "kpiece"}));
    CLI11_PARSE(app, argc, argv);
    cfg.planner = rtc::planner_kind_from_string(planner);

    int port = 8080;
    if (const char* env = std::getenv("GRTC_PORT")) {
        try {
            port = std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "error: GRTC_PORT must be a port number\n";
            return 1;
        }
    }
    try {
        cfg.gcfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    rtc::SessionManager sessions(cfg);
    httplib::Server server;
    rtc::register_routes(server, sessions);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}
