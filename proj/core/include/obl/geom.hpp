#pragma once

#include <Eigen/Core>
#include <cmath>

namespace obl {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// z-component of the 2D cross product a x b.
inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

/// Counterclockwise quarter turn.
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline Vec2 unit_from_angle(double a) { return Vec2(std::cos(a), std::sin(a)); }

inline double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

/// Reduce to [0, 2pi).
inline double mod_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    return r < 0 ? r + kTwoPi : r;
}

/// Reduce to (-pi, pi].
inline double wrap_pm_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    if (r > kPi) r -= kTwoPi;
    return r;
}

/// Signed angle of the smallest rotation taking direction a to direction b.
inline double angle_between(const Vec2& a, const Vec2& b) {
    return std::atan2(cross2(a, b), a.dot(b));
}

/// Distance on the cylinder [0,2pi) x R: phi wrapped, theta straight.
inline double cylinder_dist(double phi_a, double theta_a, double phi_b, double theta_b) {
    double dphi = wrap_pm_pi(phi_a - phi_b);
    double dth = theta_a - theta_b;
    return std::sqrt(dphi * dphi + dth * dth);
}

}  // namespace obl
