#include "rtc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rtc {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct Interval {
    double lo;
    double hi;
};

template <std::size_t N>
Interval project(const std::array<Vec2, N>& pts, const Vec2& axis) {
    Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        const double d = dot(p, axis);
        iv.lo = std::min(iv.lo, d);
        iv.hi = std::max(iv.hi, d);
    }
    return iv;
}

std::array<Vec2, 4> separating_axes(const Pose2& pa, const Pose2& pb) {
    return {pa.rotate({1, 0}), pa.rotate({0, 1}), pb.rotate({1, 0}), pb.rotate({0, 1})};
}

// Closest point of a posed rectangle to p, in world coordinates.
Vec2 closest_point_on_rectangle(const Rectangle& r, const Pose2& pose, const Vec2& p) {
    const Vec2 local = pose.apply_inverse(p);
    return pose.apply({std::clamp(local.x, -r.half_x, r.half_x), std::clamp(local.y, -r.half_y, r.half_y)});
}

// Sutherland-Hodgman clip of a convex polygon against a convex CCW polygon.
std::vector<Vec2> clip_convex(std::vector<Vec2> subject, std::span<const Vec2> clip) {
    for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
        const Vec2 a = clip[i];
        const Vec2 b = clip[(i + 1) % clip.size()];
        const Vec2 edge = b - a;
        std::vector<Vec2> out;
        out.reserve(subject.size() + 1);
        for (std::size_t j = 0; j < subject.size(); ++j) {
            const Vec2 p = subject[j];
            const Vec2 q = subject[(j + 1) % subject.size()];
            const double dp = cross(edge, p - a);
            const double dq = cross(edge, q - a);
            if (dp >= 0) out.push_back(p);
            if ((dp >= 0) != (dq >= 0)) {
                const double t = dp / (dp - dq);
                out.push_back(p + (q - p) * t);
            }
        }
        subject = std::move(out);
    }
    return subject;
}

std::optional<Contact> rect_rect_penetration(const Rectangle& ra, const Pose2& pa, const Rectangle& rb,
                                             const Pose2& pb) {
    const auto ca = rectangle_corners(ra, pa);
    const auto cb = rectangle_corners(rb, pb);
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_axis;
    for (const auto& axis : separating_axes(pa, pb)) {
        const Interval ia = project(ca, axis);
        const Interval ib = project(cb, axis);
        // Translation of b along +axis or -axis that ends the overlap.
        const double forward = ia.hi - ib.lo;
        const double backward = ib.hi - ia.lo;
        if (forward <= 0 || backward <= 0) return std::nullopt;
        if (forward < best) {
            best = forward;
            best_axis = axis;
        }
        if (backward < best) {
            best = backward;
            best_axis = -axis;
        }
    }

    // Contact point: the sharper end of the overlap region along the normal
    // (a corner when one body's vertex digs into the other's face, the patch
    // midpoint for flush faces). Unlike the region centroid this does not
    // drift with penetration depth, so the rotation it induces converges as
    // the step shrinks.
    const auto region = clip_convex({cb.begin(), cb.end()}, ca);
    Vec2 point = 0.5 * (pa.position() + pb.position());
    if (!region.empty()) {
        const Vec2 tangent = perp(best_axis);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : region) {
            lo = std::min(lo, dot(p, best_axis));
            hi = std::max(hi, dot(p, best_axis));
        }
        const double band = 0.01 * (hi - lo) + 1e-12;
        struct End {
            double t_lo{std::numeric_limits<double>::infinity()};
            double t_hi{-std::numeric_limits<double>::infinity()};
            Vec2 sum;
            int n{0};
        };
        End near_lo;
        End near_hi;
        for (const auto& p : region) {
            const double d = dot(p, best_axis);
            const double t = dot(p, tangent);
            for (End* e : {d <= lo + band ? &near_lo : nullptr, d >= hi - band ? &near_hi : nullptr}) {
                if (!e) continue;
                e->t_lo = std::min(e->t_lo, t);
                e->t_hi = std::max(e->t_hi, t);
                e->sum += p;
                ++e->n;
            }
        }
        const End& e = (near_lo.t_hi - near_lo.t_lo) <= (near_hi.t_hi - near_hi.t_lo) ? near_lo : near_hi;
        const double t_mid = 0.5 * (e.t_lo + e.t_hi);
        const Vec2 c = e.sum * (1.0 / static_cast<double>(e.n));
        point = c + tangent * (t_mid - dot(c, tangent));
    }
    return Contact{best, best_axis, point};
}

// Contact with normal pointing from the rectangle toward the circle.
std::optional<Contact> rect_circle_penetration(const Rectangle& r, const Pose2& pr, double radius,
                                               const Pose2& pc) {
    const Vec2 local = pr.apply_inverse(pc.position());
    const bool inside = std::abs(local.x) <= r.half_x && std::abs(local.y) <= r.half_y;
    if (!inside) {
        const Vec2 q{std::clamp(local.x, -r.half_x, r.half_x), std::clamp(local.y, -r.half_y, r.half_y)};
        const Vec2 diff = local - q;
        const double d = norm(diff);
        if (d >= radius) return std::nullopt;
        return Contact{radius - d, pr.rotate(diff * (1.0 / d)), pr.apply(q)};
    }
    // Centre inside the box: push out through the nearest face.
    const double dx = r.half_x - std::abs(local.x);
    const double dy = r.half_y - std::abs(local.y);
    Vec2 n_local;
    Vec2 face;
    double depth = 0;
    if (dx <= dy) {
        const double s = local.x >= 0 ? 1.0 : -1.0;
        n_local = {s, 0};
        face = {s * r.half_x, local.y};
        depth = radius + dx;
    } else {
        const double s = local.y >= 0 ? 1.0 : -1.0;
        n_local = {0, s};
        face = {local.x, s * r.half_y};
        depth = radius + dy;
    }
    return Contact{depth, pr.rotate(n_local), pr.apply(face)};
}

std::optional<Contact> circle_circle_penetration(double ra, const Pose2& pa, double rb, const Pose2& pb) {
    const Vec2 diff = pb.position() - pa.position();
    const double d = norm(diff);
    const double depth = ra + rb - d;
    if (depth <= 0) return std::nullopt;
    const Vec2 n = d > 0 ? diff * (1.0 / d) : Vec2{1, 0};
    return Contact{depth, n, pa.position() + n * (ra - 0.5 * depth)};
}

double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
}

// Earliest t in [0,1] with f(t) <= threshold for convex f, or nullopt.
template <typename F>
std::optional<double> first_below_convex(F&& f, double threshold) {
    if (f(0.0) <= threshold) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    const double t_min = 0.5 * (lo + hi);
    if (f(t_min) > threshold) return std::nullopt;
    double a = 0.0;
    double b = t_min;
    for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        if (f(m) <= threshold) {
            b = m;
        } else {
            a = m;
        }
    }
    return b;
}

}  // namespace

double normalize_angle(double angle) {
    double a = std::remainder(angle, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

double angle_distance(double a, double b) { return std::abs(normalize_angle(a - b)); }

Vec2 Pose2::apply(const Vec2& local) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
}

Vec2 Pose2::apply_inverse(const Vec2& world) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double dx = world.x - x;
    const double dy = world.y - y;
    return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 Pose2::rotate(const Vec2& v) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Pose2 compose(const Pose2& a, const Pose2& b) {
    const Vec2 p = a.apply({b.x, b.y});
    return {p.x, p.y, a.theta + b.theta};
}

Pose2 inverse(const Pose2& a) {
    const double c = std::cos(a.theta);
    const double s = std::sin(a.theta);
    return {-c * a.x - s * a.y, s * a.x - c * a.y, -a.theta};
}

Shape Shape::rectangle(double half_x, double half_y) {
    if (!(half_x > 0) || !(half_y > 0) || !std::isfinite(half_x) || !std::isfinite(half_y)) {
        throw std::invalid_argument("rectangle half extents must be positive and finite");
    }
    return Shape(Rectangle{half_x, half_y});
}

Shape Shape::circle(double radius) {
    if (!(radius > 0) || !std::isfinite(radius)) {
        throw std::invalid_argument("circle radius must be positive and finite");
    }
    return Shape(CircleShape{radius});
}

double Shape::bounding_radius() const {
    if (is_circle()) return circ().radius;
    return std::hypot(rect().half_x, rect().half_y);
}

Circle2 min_enclosing_circle(const Shape& shape, const Pose2& pose) {
    return {pose.position(), shape.bounding_radius()};
}

std::array<Vec2, 4> rectangle_corners(const Rectangle& r, const Pose2& pose) {
    return {pose.apply({-r.half_x, -r.half_y}), pose.apply({r.half_x, -r.half_y}),
            pose.apply({r.half_x, r.half_y}), pose.apply({-r.half_x, r.half_y})};
}

bool point_in_shape(const Shape& shape, const Pose2& pose, const Vec2& p) {
    if (shape.is_circle()) return norm(p - pose.position()) <= shape.circ().radius;
    const Vec2 local = pose.apply_inverse(p);
    return std::abs(local.x) <= shape.rect().half_x && std::abs(local.y) <= shape.rect().half_y;
}

double distance_to_shape(const Shape& shape, const Pose2& pose, const Vec2& p) {
    if (shape.is_circle()) return std::max(0.0, norm(p - pose.position()) - shape.circ().radius);
    return norm(p - closest_point_on_rectangle(shape.rect(), pose, p));
}

bool shapes_overlap(const Shape& sa, const Pose2& pa, const Shape& sb, const Pose2& pb) {
    if (sa.is_rectangle() && sb.is_rectangle()) {
        const auto ca = rectangle_corners(sa.rect(), pa);
        const auto cb = rectangle_corners(sb.rect(), pb);
        for (const auto& axis : separating_axes(pa, pb)) {
            const Interval ia = project(ca, axis);
            const Interval ib = project(cb, axis);
            if (std::min(ia.hi, ib.hi) - std::max(ia.lo, ib.lo) < -kTouchEpsilon) return false;
        }
        return true;
    }
    if (sa.is_circle() && sb.is_circle()) {
        return norm(pb.position() - pa.position()) <= sa.circ().radius + sb.circ().radius + kTouchEpsilon;
    }
    const bool a_is_circle = sa.is_circle();
    const Shape& rect = a_is_circle ? sb : sa;
    const Pose2& rect_pose = a_is_circle ? pb : pa;
    const Shape& circle = a_is_circle ? sa : sb;
    const Pose2& circle_pose = a_is_circle ? pa : pb;
    return distance_to_shape(rect, rect_pose, circle_pose.position()) <= circle.circ().radius + kTouchEpsilon;
}

std::optional<Contact> penetration(const Shape& sa, const Pose2& pa, const Shape& sb, const Pose2& pb) {
    if (sa.is_rectangle() && sb.is_rectangle()) return rect_rect_penetration(sa.rect(), pa, sb.rect(), pb);
    if (sa.is_circle() && sb.is_circle()) {
        return circle_circle_penetration(sa.circ().radius, pa, sb.circ().radius, pb);
    }
    if (sa.is_rectangle()) return rect_circle_penetration(sa.rect(), pa, sb.circ().radius, pb);
    auto c = rect_circle_penetration(sb.rect(), pb, sa.circ().radius, pa);
    if (c) c->normal = -c->normal;
    return c;
}

std::optional<double> first_contact_time(const Shape& moving, const Pose2& moving_pose, const Vec2& displacement,
                                         const Shape& fixed, const Pose2& fixed_pose) {
    if (moving.is_rectangle() && fixed.is_rectangle()) {
        // Translational SAT: the overlap set in t is the intersection of the
        // per-axis overlap intervals.
        const auto ca = rectangle_corners(moving.rect(), moving_pose);
        const auto cb = rectangle_corners(fixed.rect(), fixed_pose);
        double t_lo = 0.0;
        double t_hi = 1.0;
        for (const auto& axis : separating_axes(moving_pose, fixed_pose)) {
            const Interval ia = project(ca, axis);
            const Interval ib = project(cb, axis);
            const double v = dot(displacement, axis);
            // Need ia.lo + t v <= ib.hi + eps and ia.hi + t v >= ib.lo - eps.
            const double upper = ib.hi + kTouchEpsilon - ia.lo;
            const double lower = ib.lo - kTouchEpsilon - ia.hi;
            if (v == 0.0) {
                if (upper < 0 || lower > 0) return std::nullopt;
                continue;
            }
            double a = lower / v;
            double b = upper / v;
            if (a > b) std::swap(a, b);
            t_lo = std::max(t_lo, a);
            t_hi = std::min(t_hi, b);
            if (t_lo > t_hi) return std::nullopt;
        }
        return t_lo;
    }
    // Any pair involving a circle: the clearance along a straight
    // translation is convex in t.
    auto clearance = [&](double t) {
        const Pose2 moved{moving_pose.x + t * displacement.x, moving_pose.y + t * displacement.y, moving_pose.theta};
        if (moving.is_circle() && fixed.is_circle()) {
            return norm(fixed_pose.position() - moved.position()) - moving.circ().radius - fixed.circ().radius;
        }
        if (moving.is_circle()) {
            return distance_to_shape(fixed, fixed_pose, moved.position()) - moving.circ().radius;
        }
        return distance_to_shape(moving, moved, fixed_pose.position()) - fixed.circ().radius;
    };
    return first_below_convex(clearance, kTouchEpsilon);
}

Pose2 SweptVolume::body_pose(double t) const {
    const Vec2 p = segment_start + (segment_end - segment_start) * t;
    return {p.x, p.y, heading};
}

bool swept_contains(const SweptVolume& v, const Vec2& point) {
    const Pose2 start = v.body_pose(0.0);
    const Pose2 end = v.body_pose(1.0);
    for (const auto& part : v.footprint) {
        const Pose2 a = compose(start, part.pose);
        const Pose2 b = compose(end, part.pose);
        if (part.shape.is_circle()) {
            if (segment_point_distance(a.position(), b.position(), point) <= part.shape.circ().radius) return true;
            continue;
        }
        const auto ca = rectangle_corners(part.shape.rect(), a);
        const auto cb = rectangle_corners(part.shape.rect(), b);
        std::vector<Vec2> pts(ca.begin(), ca.end());
        pts.insert(pts.end(), cb.begin(), cb.end());
        if (point_in_convex_polygon(convex_hull(std::move(pts)), point)) return true;
    }
    return false;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(),
              [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) return points;
    std::vector<Vec2> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        const Vec2& p = points[i];
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p) {
    if (polygon.size() < 3) return false;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        if (cross(b - a, p - a) < 0) return false;
    }
    return true;
}

}  // namespace rtc
