#ifndef BILLIARDS_GEOMETRY_HPP
#define BILLIARDS_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>

namespace billiards {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Rotation by +90 degrees; maps the tangent of a CCW curve to its inward normal.
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline Vec2 unit_vector(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

inline double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

inline Vec2 rotated(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

// Signed angle from a to b in (-pi, pi].
inline double signed_angle(const Vec2& a, const Vec2& b) {
    return std::atan2(cross2(a, b), a.dot(b));
}

// Wrap a boundary parameter into [0, 1).
inline double wrap01(double s) {
    double r = s - std::floor(s);
    return (r >= 1.0) ? 0.0 : r;
}

// Signed circle difference a - b mapped to [-1/2, 1/2).
inline double circle_diff(double a, double b) {
    double d = a - b;
    d -= std::round(d);
    return d;
}

inline double circle_dist(double a, double b) { return std::abs(circle_diff(a, b)); }

// Distance from p to the closed segment [a, b]; closest point parameter in [0,1] via *t.
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                                     double* t = nullptr) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double u = (len2 > 0.0) ? (p - a).dot(ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    if (t) *t = u;
    return (p - (a + u * ab)).norm();
}

// Distance from p to the infinite line through a, b (|ab| > 0 assumed).
inline double point_line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    return std::abs(cross2(ab, p - a)) / ab.norm();
}

}  // namespace billiards

#endif
