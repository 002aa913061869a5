// Time sources for planning budgets.
//
// WallClock measures real elapsed time. WorkClock advances only when work
// is charged to it (simulated substeps, metric evaluations, guidance
// checks), which makes budgets and reported times reproducible bit for bit.

#pragma once

#include <chrono>
#include <cstddef>

namespace rtc {

class Clock {
public:
    virtual ~Clock() = default;

    /// Seconds since an arbitrary origin.
    virtual double now() = 0;

    virtual void charge_substeps(std::size_t /*n*/) {}
    virtual void charge_distance_evals(std::size_t /*n*/) {}
    virtual void charge_geometry_checks(std::size_t /*n*/) {}
};

class WallClock final : public Clock {
public:
    WallClock() : origin_(std::chrono::steady_clock::now()) {}

    double now() override {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
    }

private:
    std::chrono::steady_clock::time_point origin_;
};

/// Per-unit costs, in seconds, charged to a WorkClock.
struct WorkCosts {
    double substep{4e-6};
    double distance_eval{2e-8};
    double geometry_check{2e-7};
};

class WorkClock final : public Clock {
public:
    explicit WorkClock(WorkCosts costs = {}) : costs_(costs) {}

    double now() override { return elapsed_; }

    void charge_substeps(std::size_t n) override { elapsed_ += costs_.substep * static_cast<double>(n); }
    void charge_distance_evals(std::size_t n) override {
        elapsed_ += costs_.distance_eval * static_cast<double>(n);
    }
    void charge_geometry_checks(std::size_t n) override {
        elapsed_ += costs_.geometry_check * static_cast<double>(n);
    }

private:
    WorkCosts costs_;
    double elapsed_{0};
};

}  // namespace rtc
