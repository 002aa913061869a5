// Independent reference computations used by the tests. Nothing here calls
// the library's geometry routines; membership is evaluated from first
// principles so the oracles can disagree with the code under test.

#pragma once

#include <array>
#include <cmath>
#include <string>

#include "rtc/world.hpp"

namespace oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 homogeneous(double x, double y, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {{{c, -s, x}, {s, c, y}, {0, 0, 1}}};
}

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    return out;
}

/// (x, y, theta) read back from a homogeneous matrix.
inline std::array<double, 3> pose_of(const Mat3& m) { return {m[0][2], m[1][2], std::atan2(m[1][0], m[0][0])}; }

/// Point membership with an outward margin (negative shrinks the shape).
inline bool inside(const rtc::Shape& shape, double px, double py, double theta, double qx, double qy,
                   double margin = 0.0) {
    const double dx = qx - px;
    const double dy = qy - py;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    if (shape.is_circle()) return std::hypot(lx, ly) <= shape.circ().radius + margin;
    return std::abs(lx) <= shape.rect().half_x + margin && std::abs(ly) <= shape.rect().half_y + margin;
}

inline bool inside(const rtc::Shape& shape, const rtc::Pose2& pose, const rtc::Vec2& q, double margin = 0.0) {
    return inside(shape, pose.x, pose.y, pose.theta, q.x, q.y, margin);
}

/// Footprint part placed at body pose (bx, by, bth).
inline rtc::Pose2 place(const rtc::Pose2& body, const rtc::Pose2& local) {
    const auto m = pose_of(multiply(homogeneous(body.x, body.y, body.theta), homogeneous(local.x, local.y, local.theta)));
    return {m[0], m[1], m[2]};
}

inline rtc::Shape shrink(const rtc::Shape& s, double d) {
    if (s.is_circle()) return rtc::Shape::circle(s.circ().radius - d);
    return rtc::Shape::rectangle(s.rect().half_x - d, s.rect().half_y - d);
}

inline std::string scene_path(const std::string& name) { return std::string(RTC_SCENE_DIR) + "/" + name; }

}  // namespace oracle
