// Planar geometry: SE(2) poses, convex shape primitives, overlap and
// penetration queries, enclosing circles and translational sweeps.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace rtc {

inline constexpr double kPi = std::numbers::pi;

/// Distance below which two shapes are considered touching.
inline constexpr double kTouchEpsilon = 1e-9;

struct Vec2 {
    double x{0};
    double y{0};

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(const Vec2& a, double s) { return {a.x * s, a.y * s}; }
    friend Vec2 operator*(double s, const Vec2& a) { return {a.x * s, a.y * s}; }
    friend Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Maps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Smallest absolute difference between two angles, in [0, pi].
double angle_distance(double a, double b);

/// Planar rigid transform. theta is kept in (-pi, pi].
struct Pose2 {
    double x{0};
    double y{0};
    double theta{0};

    Pose2() = default;
    Pose2(double x_, double y_, double theta_)
        : x(x_), y(y_), theta(normalize_angle(theta_)) {}

    static Pose2 identity() { return {}; }

    [[nodiscard]] Vec2 position() const { return {x, y}; }
    [[nodiscard]] Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }

    /// Maps a point from this pose's local frame to the parent frame.
    [[nodiscard]] Vec2 apply(const Vec2& local) const;
    /// Maps a point from the parent frame into this pose's local frame.
    [[nodiscard]] Vec2 apply_inverse(const Vec2& world) const;
    /// Rotates a direction without translating it.
    [[nodiscard]] Vec2 rotate(const Vec2& v) const;

    friend bool operator==(const Pose2&, const Pose2&) = default;
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);

struct Rectangle {
    double half_x{0};
    double half_y{0};
    friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

struct CircleShape {
    double radius{0};
    friend bool operator==(const CircleShape&, const CircleShape&) = default;
};

/// A convex primitive with strictly positive extents.
class Shape {
public:
    using Variant = std::variant<Rectangle, CircleShape>;

    static Shape rectangle(double half_x, double half_y);
    static Shape circle(double radius);

    [[nodiscard]] bool is_rectangle() const { return std::holds_alternative<Rectangle>(v_); }
    [[nodiscard]] bool is_circle() const { return std::holds_alternative<CircleShape>(v_); }
    [[nodiscard]] const Rectangle& rect() const { return std::get<Rectangle>(v_); }
    [[nodiscard]] const CircleShape& circ() const { return std::get<CircleShape>(v_); }
    [[nodiscard]] const Variant& variant() const { return v_; }

    /// Radius of the smallest circle about the shape's origin containing it.
    [[nodiscard]] double bounding_radius() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    explicit Shape(Variant v) : v_(v) {}
    Variant v_;
};

/// A shape placed in the plane.
struct PosedShape {
    Shape shape;
    Pose2 pose;
};

struct Circle2 {
    Vec2 center;
    double radius{0};
};

Circle2 min_enclosing_circle(const Shape& shape, const Pose2& pose);

/// Corners of a posed rectangle in counter-clockwise order.
std::array<Vec2, 4> rectangle_corners(const Rectangle& r, const Pose2& pose);

bool point_in_shape(const Shape& shape, const Pose2& pose, const Vec2& p);

/// True iff the posed shapes intersect or are within kTouchEpsilon of touching.
bool shapes_overlap(const Shape& sa, const Pose2& pa, const Shape& sb, const Pose2& pb);

/// Penetration between two overlapping shapes. Translating b by
/// normal * depth separates the pair; point is a representative contact
/// location used for torque estimates.
struct Contact {
    double depth{0};
    Vec2 normal;
    Vec2 point;
};

/// nullopt when the shapes do not overlap with positive depth.
std::optional<Contact> penetration(const Shape& sa, const Pose2& pa, const Shape& sb, const Pose2& pb);

/// Euclidean distance from p to a posed shape (0 when inside).
double distance_to_shape(const Shape& shape, const Pose2& pose, const Vec2& p);

/// Earliest t in [0, 1] at which `moving`, translated by t * displacement,
/// overlaps `fixed`. nullopt if the pair never overlaps along the sweep.
std::optional<double> first_contact_time(const Shape& moving, const Pose2& moving_pose,
                                         const Vec2& displacement, const Shape& fixed,
                                         const Pose2& fixed_pose);

/// Region covered by a rigid multi-part footprint translated, at a fixed
/// heading, from segment_start to segment_end. The footprint parts are
/// expressed in a body frame whose origin travels along the segment.
struct SweptVolume {
    std::vector<PosedShape> footprint;
    Vec2 segment_start;
    Vec2 segment_end;
    double heading{0};

    [[nodiscard]] Pose2 body_pose(double t) const;
};

bool swept_contains(const SweptVolume& v, const Vec2& point);

/// Convex hull (counter-clockwise, no collinear points) of a point set.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p);

}  // namespace rtc
