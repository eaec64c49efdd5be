#include "hnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hnav/log.hpp"

namespace hnav {

namespace {
constexpr double kStraightW = 1e-6;  // rad/s, below this an arc is a line
}

Pose integrate_arc(const Pose& p, const Twist& cmd, double dt)
{
    Pose out = p;
    if (std::fabs(cmd.w) < kStraightW) {
        out.x += cmd.v * dt * std::cos(p.theta);
        out.y += cmd.v * dt * std::sin(p.theta);
        out.theta = wrap_angle(p.theta + cmd.w * dt);
        return out;
    }
    const double r = cmd.v / cmd.w;
    out.x += r * (std::sin(p.theta + cmd.w * dt) - std::sin(p.theta));
    out.y += -r * (std::cos(p.theta + cmd.w * dt) - std::cos(p.theta));
    out.theta = wrap_angle(p.theta + cmd.w * dt);
    return out;
}

RobotState step_robot(const RobotState& s, const Twist& cmd, double dt,
                      const VelocityLimits& limits)
{
    Twist applied;
    applied.v = clampd(cmd.v, limits.v_min, limits.v_max);
    applied.w = clampd(cmd.w, -limits.w_max, limits.w_max);
    if (applied.v != cmd.v || applied.w != cmd.w) {
        diag::debug("step_robot clamped command (%.3f, %.3f) to (%.3f, %.3f)", cmd.v, cmd.w,
                    applied.v, applied.w);
    }
    RobotState out;
    out.pose = integrate_arc(s.pose, applied, dt);
    out.twist = applied;
    out.time = s.time + dt;
    return out;
}

Pose obstacle_pose(const ObstacleScript& s, double t)
{
    Pose p;
    if (s.knots.empty()) return p;

    auto seg_heading = [&](size_t i) {
        const auto& a = s.knots[i];
        const auto& b = s.knots[i + 1];
        if (a.x == b.x && a.y == b.y) return 0.0;
        return std::atan2(b.y - a.y, b.x - a.x);
    };

    if (t <= s.knots.front().t || s.knots.size() == 1) {
        p.x = s.knots.front().x;
        p.y = s.knots.front().y;
        p.theta = s.knots.size() > 1 ? seg_heading(0) : 0.0;
        return p;
    }
    if (t >= s.knots.back().t) {
        p.x = s.knots.back().x;
        p.y = s.knots.back().y;
        p.theta = seg_heading(s.knots.size() - 2);
        return p;
    }
    size_t i = 0;
    while (s.knots[i + 1].t < t) ++i;
    const auto& a = s.knots[i];
    const auto& b = s.knots[i + 1];
    const double u = (t - a.t) / (b.t - a.t);
    p.x = a.x + u * (b.x - a.x);
    p.y = a.y + u * (b.y - a.y);
    p.theta = seg_heading(i);
    return p;
}

namespace {

// First occupied static cell along the ray, as distance to the cell's entry
// boundary. Unknown cells are transparent. Returns +inf when nothing is hit
// within limit or the ray leaves the map.
double raycast_static(const OccupancyGrid& g, double px, double py, double dx, double dy,
                      double limit)
{
    const double inf = std::numeric_limits<double>::infinity();
    int ix = static_cast<int>(std::floor((px - g.origin_x) / g.resolution));
    int iy = static_cast<int>(std::floor((py - g.origin_y) / g.resolution));

    if (g.in_bounds(ix, iy) && g.at(ix, iy) == kCostLethal) return 0.0;

    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    double t_max_x = inf, t_delta_x = inf;
    double t_max_y = inf, t_delta_y = inf;
    if (dx != 0.0) {
        const double bx = g.origin_x + (ix + (dx > 0.0 ? 1 : 0)) * g.resolution;
        t_max_x = (bx - px) / dx;
        t_delta_x = g.resolution / std::fabs(dx);
    }
    if (dy != 0.0) {
        const double by = g.origin_y + (iy + (dy > 0.0 ? 1 : 0)) * g.resolution;
        t_max_y = (by - py) / dy;
        t_delta_y = g.resolution / std::fabs(dy);
    }

    while (true) {
        double t_entry;
        if (t_max_x < t_max_y) {
            t_entry = t_max_x;
            ix += step_x;
            t_max_x += t_delta_x;
        } else {
            t_entry = t_max_y;
            iy += step_y;
            t_max_y += t_delta_y;
        }
        if (t_entry > limit) return inf;
        if (!g.in_bounds(ix, iy)) return inf;
        if (g.at(ix, iy) == kCostLethal) return std::max(t_entry, 0.0);
    }
}

// Nearest forward intersection with a disc; 0 when the origin is inside.
double raycast_disc(double px, double py, double dx, double dy, const ObstacleDisc& o)
{
    const double inf = std::numeric_limits<double>::infinity();
    const double cx = o.x - px, cy = o.y - py;
    const double c2 = cx * cx + cy * cy;
    if (c2 <= o.radius * o.radius) return 0.0;
    const double b = cx * dx + cy * dy;  // projection onto the unit ray
    const double disc = b * b - (c2 - o.radius * o.radius);
    if (disc < 0.0) return inf;
    const double t = b - std::sqrt(disc);
    return t >= 0.0 ? t : inf;
}

}  // namespace

ObservedGrid sense(const RobotState& s, const OccupancyGrid& static_map,
                   std::span<const ObstacleDisc> obstacles, const SensorModel& sensor,
                   Rng& rng)
{
    GridIndex robot_cell;
    if (!static_map.world_to_cell(s.pose.x, s.pose.y, robot_cell)) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "sense: robot pose (%.3f, %.3f) outside map", s.pose.x,
                      s.pose.y);
        throw PoseOutOfBounds(msg);
    }

    ObservedGrid out;
    out.grid = OccupancyGrid::filled(static_map.width, static_map.height,
                                     static_map.resolution, static_map.origin_x,
                                     static_map.origin_y);

    const double px = s.pose.x, py = s.pose.y;
    for (int k = 0; k < sensor.angular_rays; ++k) {
        const double ang = s.pose.theta + 2.0 * kPi * k / sensor.angular_rays;
        const double dx = std::cos(ang), dy = std::sin(ang);

        double hit_t = raycast_static(static_map, px, py, dx, dy, sensor.max_range);
        bool dynamic = false;
        for (const auto& o : obstacles) {
            const double t = raycast_disc(px, py, dx, dy, o);
            if (t < hit_t) {
                hit_t = t;
                dynamic = true;
            }
        }
        if (!(hit_t <= sensor.max_range)) continue;  // nothing physical in reach

        double measured = hit_t;
        if (sensor.noise_std > 0.0) {
            measured = std::max(0.0, hit_t + rng.gaussian(0.0, sensor.noise_std));
        }
        if (measured < sensor.min_range || measured > sensor.max_range) continue;

        RayHit h;
        h.x = px + measured * dx;
        h.y = py + measured * dy;
        h.range = measured;
        h.dynamic = dynamic;
        // Mark the cell just past the surface crossing, not the boundary point
        // itself: a return landing exactly on a cell edge must register the
        // struck cell, whichever direction the ray came from.
        const double eps = static_map.resolution * 1e-6;
        GridIndex idx;
        if (out.grid.world_to_cell(px + (measured + eps) * dx, py + (measured + eps) * dy, idx)) {
            out.grid.at(idx.x, idx.y) = kCostLethal;
            out.hits.push_back(h);
        }
    }

    // Beyond sensor reach the map itself is the only source of knowledge.
    for (int iy = 0; iy < static_map.height; ++iy) {
        for (int ix = 0; ix < static_map.width; ++ix) {
            const std::uint8_t v = static_map.at(ix, iy);
            if (v != kCostLethal && v != kCostUnknown) continue;
            const double d = std::hypot(static_map.cell_center_x(ix) - px,
                                        static_map.cell_center_y(iy) - py);
            if (d > sensor.max_range) out.grid.at(ix, iy) = v;
        }
    }
    return out;
}

bool check_collision(const Pose& p, const OccupancyGrid& static_map,
                     std::span<const ObstacleDisc> obstacles, double robot_radius)
{
    for (const auto& o : obstacles) {
        if (std::hypot(p.x - o.x, p.y - o.y) <= robot_radius + o.radius) return true;
    }

    // Scan one cell beyond the bounding box: exact tangency must not be lost
    // to the rounding of the box division.
    const double res = static_map.resolution;
    const int x0 = static_cast<int>(std::floor((p.x - robot_radius - static_map.origin_x) / res)) - 1;
    const int x1 = static_cast<int>(std::floor((p.x + robot_radius - static_map.origin_x) / res)) + 1;
    const int y0 = static_cast<int>(std::floor((p.y - robot_radius - static_map.origin_y) / res)) - 1;
    const int y1 = static_cast<int>(std::floor((p.y + robot_radius - static_map.origin_y) / res)) + 1;
    for (int iy = std::max(0, y0); iy <= std::min(static_map.height - 1, y1); ++iy) {
        for (int ix = std::max(0, x0); ix <= std::min(static_map.width - 1, x1); ++ix) {
            if (static_map.at(ix, iy) != kCostLethal) continue;
            const double cx0 = static_map.origin_x + ix * res;
            const double cy0 = static_map.origin_y + iy * res;
            const double qx = clampd(p.x, cx0, cx0 + res);
            const double qy = clampd(p.y, cy0, cy0 + res);
            if (std::hypot(p.x - qx, p.y - qy) <= robot_radius) return true;
        }
    }
    return false;
}

}  // namespace hnav
