#pragma once

#include <cmath>

namespace hnav {

inline constexpr double kPi = 3.14159265358979323846;

// Normalize into (-pi, pi]. +pi maps to +pi, -pi maps to +pi.
inline double wrap_angle(double a)
{
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

struct Pose {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad, kept in (-pi, pi]
};

struct Twist {
    double v = 0.0;  // m/s, forward
    double w = 0.0;  // rad/s, counter-clockwise positive
};

inline double planar_dist(const Pose& a, const Pose& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double planar_dist(const Pose& a, double x, double y)
{
    return std::hypot(a.x - x, a.y - y);
}

// Distance from point p to segment [a,b], all in the plane.
inline double point_segment_dist(double px, double py,
                                 double ax, double ay,
                                 double bx, double by)
{
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((px - ax) * dx + (py - ay) * dy) / len2;
        if (t < 0.0) t = 0.0;
        if (t > 1.0) t = 1.0;
    }
    const double cx = ax + t * dx, cy = ay + t * dy;
    return std::hypot(px - cx, py - cy);
}

inline double clampd(double v, double lo, double hi)
{
    return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace hnav
