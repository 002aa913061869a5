#include "rtc/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtc {

namespace {

// Penetrations at or below this depth are left alone by the resolver.
constexpr double kResolveEpsilon = 1e-7;

bool finite(const Pose2& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta); }

class ContactResolver {
public:
    ContactResolver(const Scene& scene, const PropagationConfig& cfg) : scene_(scene), cfg_(cfg) {
        for (const auto& o : scene.objects()) radius_.push_back(o.shape.bounding_radius());
        for (const auto& w : scene.walls()) wall_radius_.push_back(w.shape.bounding_radius());
        const std::size_t n = radius_.size();
        order_.resize(n);
        rank_.resize(n);
        active_.resize(n);
    }

    /// Resolves contacts after the robot moved to its new pose. Returns false
    /// when penetration cannot be brought under tolerance.
    bool resolve(SystemState& s) {
        const auto body = robot_body(scene_.robot(), s.robot);
        const Vec2 origin = s.robot.position();
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return norm(s.objects[a].position() - origin) < norm(s.objects[b].position() - origin);
        });
        for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
        std::fill(active_.begin(), active_.end(), false);

        const double robot_reach = scene_.robot().reach_radius();
        bool converged = false;
        for (int iter = 0; iter < cfg_.max_resolution_iterations && !converged; ++iter) {
            converged = true;
            for (const std::size_t i : order_) {
                const Shape& shape = scene_.objects()[i].shape;
                if (norm(s.objects[i].position() - origin) <= robot_reach + radius_[i]) {
                    for (std::size_t k = 0; k < body.size(); ++k) {
                        if (push(s, i, body[k].shape, body[k].pose, shape)) converged = false;
                    }
                }
                for (const std::size_t j : order_) {
                    if (rank_[j] >= rank_[i]) break;
                    if (!active_[i] && !active_[j]) continue;
                    if (norm(s.objects[i].position() - s.objects[j].position()) > radius_[i] + radius_[j]) continue;
                    if (push(s, i, scene_.objects()[j].shape, s.objects[j], shape)) converged = false;
                }
                if (active_[i]) {
                    for (std::size_t w = 0; w < scene_.walls().size(); ++w) {
                        const Wall& wall = scene_.walls()[w];
                        if (norm(s.objects[i].position() - wall.pose.position()) > radius_[i] + wall_radius_[w]) {
                            continue;
                        }
                        if (auto c = penetration(wall.shape, wall.pose, shape, s.objects[i]);
                            c && c->depth > kResolveEpsilon) {
                            // The wall cancels the normal part of the motion; whatever
                            // tangential correction was applied is kept.
                            Pose2& p = s.objects[i];
                            p = Pose2(p.x + c->normal.x * c->depth, p.y + c->normal.y * c->depth, p.theta);
                            converged = false;
                        }
                    }
                }
            }
        }
        if (converged) return true;
        return max_penetration(s, body) <= cfg_.penetration_tolerance;
    }

private:
    // Pushes object i out of a pusher. Returns true if it moved.
    bool push(SystemState& s, std::size_t i, const Shape& pusher, const Pose2& pusher_pose, const Shape& shape) {
        Pose2& p = s.objects[i];
        auto c = penetration(pusher, pusher_pose, shape, p);
        if (!c || c->depth <= kResolveEpsilon) return false;
        const Vec2 mtv = c->normal * c->depth;
        double dtheta = 0;
        if (shape.is_rectangle()) {
            const Vec2 lever = c->point - p.position();
            dtheta = cfg_.rotation_gain * cross(lever, mtv) / (radius_[i] * radius_[i]);
        }
        p = Pose2(p.x + mtv.x, p.y + mtv.y, p.theta + dtheta);
        active_[i] = true;
        return true;
    }

    double max_penetration(const SystemState& s, const std::array<PosedShape, 3>& body) const {
        double worst = 0;
        for (std::size_t i = 0; i < s.objects.size(); ++i) {
            const Shape& shape = scene_.objects()[i].shape;
            for (const auto& part : body) {
                if (auto c = penetration(part.shape, part.pose, shape, s.objects[i])) worst = std::max(worst, c->depth);
            }
            for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
                if (!active_[i] && !active_[j]) continue;
                if (auto c = penetration(scene_.objects()[j].shape, s.objects[j], shape, s.objects[i])) {
                    worst = std::max(worst, c->depth);
                }
            }
            worst = std::max(worst, wall_penetration(scene_, shape, s.objects[i]));
        }
        return worst;
    }

    const Scene& scene_;
    const PropagationConfig& cfg_;
    std::vector<double> radius_;
    std::vector<double> wall_radius_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> rank_;
    std::vector<bool> active_;
};

}  // namespace

void PropagationConfig::validate() const {
    if (!(substep_dt > 0) || !std::isfinite(substep_dt)) throw ContractViolation("substep_dt must be positive");
    if (!(penetration_tolerance > 0)) throw ContractViolation("penetration_tolerance must be positive");
    if (max_resolution_iterations < 1) throw ContractViolation("max_resolution_iterations must be >= 1");
    if (!std::isfinite(rotation_gain)) throw ContractViolation("rotation_gain must be finite");
}

PropagationConfig propagation_config_from_json(const Json& scene_json) {
    PropagationConfig cfg;
    if (!scene_json.contains("physics")) return cfg;
    const auto& p = scene_json.at("physics");
    cfg.substep_dt = p.value("substep_dt", cfg.substep_dt);
    cfg.max_resolution_iterations = p.value("max_resolution_iterations", cfg.max_resolution_iterations);
    cfg.penetration_tolerance = p.value("penetration_tolerance", cfg.penetration_tolerance);
    cfg.rotation_gain = p.value("rotation_gain", cfg.rotation_gain);
    cfg.validate();
    return cfg;
}

Json propagation_config_to_json(const PropagationConfig& cfg) {
    return {{"substep_dt", cfg.substep_dt},
            {"max_resolution_iterations", cfg.max_resolution_iterations},
            {"penetration_tolerance", cfg.penetration_tolerance},
            {"rotation_gain", cfg.rotation_gain}};
}

std::size_t substep_count(double duration, double substep_dt) {
    if (duration <= 0) return 0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(duration / substep_dt - 1e-9)));
}

Pose2 integrate_twist(const Pose2& pose, double vx, double vy, double omega, double dt) {
    const double angle = omega * dt;
    double dx = vx * dt;
    double dy = vy * dt;
    if (angle != 0.0) {
        const double s = std::sin(angle);
        const double c = std::cos(angle);
        dx = (vx * s - vy * (1.0 - c)) / omega;
        dy = (vx * (1.0 - c) + vy * s) / omega;
    }
    return compose(pose, Pose2(dx, dy, angle));
}

PropagationResult propagate(const Scene& scene, const SystemState& state, const Control& control,
                            const PropagationConfig& cfg) {
    if (state.objects.size() != scene.objects().size()) {
        throw ContractViolation("state dimension does not match scene");
    }
    if (!std::isfinite(control.vx) || !std::isfinite(control.vy) || !std::isfinite(control.omega) ||
        !std::isfinite(control.duration) || control.duration < 0) {
        throw ContractViolation("control must be finite with non-negative duration");
    }
    if (!finite(state.robot) || !std::all_of(state.objects.begin(), state.objects.end(), finite)) {
        throw ContractViolation("state must be finite");
    }

    PropagationResult result{state, true, 0};
    if (control.vx == 0.0 && control.vy == 0.0 && control.omega == 0.0) {
        result.valid = is_valid(scene, state);
        return result;
    }

    const std::size_t n = substep_count(control.duration, cfg.substep_dt);
    const double h = n > 0 ? control.duration / static_cast<double>(n) : 0.0;
    ContactResolver resolver(scene, cfg);
    SystemState& s = result.state;
    for (std::size_t k = 0; k < n; ++k) {
        s.robot = integrate_twist(s.robot, control.vx, control.vy, control.omega, h);
        ++result.substeps;
        if (robot_hits_wall(scene, s.robot) || !resolver.resolve(s) || !is_valid(scene, s)) {
            result.valid = false;
            return result;
        }
    }
    return result;
}

}  // namespace rtc
