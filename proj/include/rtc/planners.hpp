// Kinodynamic RRT and single-level KPIECE over the composite system state,
// with propagation through the pushing simulator.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtc/clock.hpp"
#include "rtc/physics.hpp"
#include "rtc/random.hpp"
#include "rtc/world.hpp"

namespace rtc {

/// Goal object inside the gripper mouth.
struct ReachGoalObject {};

/// Robot at any of the listed poses.
struct RobotPoses {
    std::vector<Pose2> poses;
    double pos_tol{0.01};
    double ang_tol{0.1};
};

/// Object centroid inside a disc of the given diameter.
struct ObjectToRegion {
    std::size_t object{0};
    Vec2 centroid;
    double diameter{0.08};
};

using GoalSpec = std::variant<ReachGoalObject, RobotPoses, ObjectToRegion>;

void validate_goal(const Scene& scene, const GoalSpec& goal);

bool goal_satisfied(const Scene& scene, const SystemState& state, const GoalSpec& goal);

struct PlannerConfig {
    double time_limit{10.0};
    std::uint64_t seed{0};
    double v_max{0.10};
    double omega_max{1.0};
    double t_min{0.5};
    double t_max{2.0};
    double goal_bias{0.05};
    double kpiece_cell_size{0.04};
    double kpiece_interior_bias{0.7};
    double nn_theta_weight{0.05};
    PropagationConfig physics{};

    void validate() const;
};

/// Nearest-neighbour metric: robot position distance plus weighted heading
/// distance, plus the pushed object's displacement for push goals.
double distance(const SystemState& a, const SystemState& b, const GoalSpec& goal, const PlannerConfig& cfg);

/// Heuristic distance of a state from satisfying the goal (0 when satisfied
/// is not guaranteed; used only for guiding expansion).
double goal_distance(const Scene& scene, const SystemState& state, const GoalSpec& goal, const PlannerConfig& cfg);

struct Plan {
    std::vector<Control> controls;
    /// controls.size() + 1 states; states[0] is the start.
    std::vector<SystemState> states;
    double planning_time{0};
};

enum class PlanStatus { solved, timeout, invalid_start };

std::string to_string(PlanStatus s);

struct PlanResult {
    PlanStatus status{PlanStatus::timeout};
    Plan plan;
    double planning_time{0};
    std::size_t iterations{0};
    std::size_t motions{0};

    [[nodiscard]] bool solved() const { return status == PlanStatus::solved; }
};

enum class PlannerKind { rrt, kpiece };

std::string to_string(PlannerKind k);
PlannerKind planner_kind_from_string(const std::string& s);

Control sample_control(Rng& rng, const PlannerConfig& cfg);

/// Motion tree node shared by both planners.
struct Motion {
    SystemState state;
    Control control;
    std::optional<std::size_t> parent;
};

/// Kinodynamic RRT: goal-biased state sampling, nearest neighbour by linear
/// scan, one random control per expansion.
class RrtPlanner {
public:
    RrtPlanner(const Scene& scene, SystemState start, GoalSpec goal, PlannerConfig cfg);

    PlanResult solve(Clock& clock);

    /// One sample/extend step. Returns the index of the added motion if the
    /// extension was valid.
    std::optional<std::size_t> extend(Clock& clock);

    [[nodiscard]] const std::vector<Motion>& motions() const { return motions_; }

private:
    SystemState sample_target();

    const Scene& scene_;
    GoalSpec goal_;
    PlannerConfig cfg_;
    Rng rng_;
    std::vector<Motion> motions_;
};

/// Single-level KPIECE grid over a 2-D or 4-D projection.
class KpieceGrid {
public:
    using Coord = std::vector<std::int64_t>;

    struct Cell {
        Coord coord;
        std::vector<std::size_t> motions;
        std::size_t visits{0};
        double score{1.0};
        int neighbors{0};
    };

    explicit KpieceGrid(std::size_t dimension) : dimension_(dimension) {}

    /// Inserts a motion; creates the cell and updates neighbour counts if new.
    /// Returns the cell index.
    std::size_t add(const Coord& coord, std::size_t motion);

    [[nodiscard]] bool interior(std::size_t cell) const {
        return cells_[cell].neighbors == static_cast<int>(2 * dimension_);
    }
    [[nodiscard]] double importance(std::size_t cell) const;

    /// Picks an exterior cell with probability 1 - interior_bias (interior
    /// otherwise, falling back to whichever class is non-empty), taking the
    /// highest-importance cell of that class. Increments its visit count.
    std::size_t select(Rng& rng, double interior_bias);

    [[nodiscard]] const Cell& cell(std::size_t i) const { return cells_[i]; }
    Cell& cell(std::size_t i) { return cells_[i]; }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] std::optional<std::size_t> find(const Coord& coord) const;

private:
    std::size_t dimension_;
    std::vector<Cell> cells_;
    std::map<Coord, std::size_t> index_;
};

class KpiecePlanner {
public:
    /// Score multiplier applied to a cell whose expansion was invalid.
    static constexpr double kFailurePenalty = 0.5;

    KpiecePlanner(const Scene& scene, SystemState start, GoalSpec goal, PlannerConfig cfg);

    PlanResult solve(Clock& clock);

    /// One select/expand step; returns the new motion index when valid.
    std::optional<std::size_t> expand(Clock& clock);

    [[nodiscard]] KpieceGrid::Coord project(const SystemState& s) const;
    [[nodiscard]] const KpieceGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<Motion>& motions() const { return motions_; }
    /// Cell chosen by the most recent expand() call.
    [[nodiscard]] std::optional<std::size_t> last_selected_cell() const { return last_cell_; }

private:
    void insert(std::size_t motion);

    const Scene& scene_;
    GoalSpec goal_;
    PlannerConfig cfg_;
    Rng rng_;
    std::vector<Motion> motions_;
    std::vector<double> goal_dist_;
    std::size_t best_motion_{0};
    KpieceGrid grid_;
    std::optional<std::size_t> last_cell_;
};

PlanResult rrt_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg,
                    Clock& clock);
PlanResult rrt_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg);
PlanResult kpiece_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg,
                       Clock& clock);
PlanResult kpiece_plan(const Scene& scene, const SystemState& start, const GoalSpec& goal, const PlannerConfig& cfg);

PlanResult plan(PlannerKind kind, const Scene& scene, const SystemState& start, const GoalSpec& goal,
                const PlannerConfig& cfg, Clock& clock);

/// Re-propagates a plan's controls from its first state; true iff every
/// stored state is reproduced exactly and every step is valid.
bool replay_matches(const Scene& scene, const Plan& plan, const PropagationConfig& physics);

Json plan_to_json(const Plan& plan);

}  // namespace rtc
