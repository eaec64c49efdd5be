#include "hnav/dwa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hnav::dwa {

VelocityWindow dynamic_window(const Twist& current, const DwaConfig& cfg, double dt)
{
    VelocityWindow win;
    win.v_lo = std::max(cfg.v_min, current.v - cfg.a_v * dt);
    win.v_hi = std::min(cfg.v_max, current.v + cfg.a_v * dt);
    win.w_lo = std::max(-cfg.w_max, current.w - cfg.a_w * dt);
    win.w_hi = std::min(cfg.w_max, current.w + cfg.a_w * dt);
    return win;
}

ArcTrajectory simulate_arc(const Pose& start, const Twist& cmd, double sim_time, double step)
{
    ArcTrajectory traj;
    traj.command = cmd;
    const int whole = static_cast<int>(sim_time / step);
    traj.poses.reserve(static_cast<size_t>(whole) + 1);
    Pose p = start;
    double t = 0.0;
    for (int i = 0; i < whole; ++i) {
        p = integrate_arc(p, cmd, step);
        t += step;
        traj.poses.push_back(p);
    }
    if (t < sim_time - 1e-12) {
        p = integrate_arc(p, cmd, sim_time - t);
        traj.poses.push_back(p);
    }
    return traj;
}

Score score(const ArcTrajectory& traj, const LocalCostmap& costmap, const WaypointSet& wps,
            const Pose& goal, const DwaConfig& cfg)
{
    Score s;
    double max_cost = 0.0;
    for (const Pose& p : traj.poses) {
        const std::uint8_t c = costmap.grid.cost_at_world(p.x, p.y);
        if (c >= kCostInscribed) return s;  // infeasible, unknown included
        if (c > max_cost) max_cost = c;
    }

    const Pose& end = traj.terminal();
    double wp_dist = std::numeric_limits<double>::infinity();
    for (const auto& wp : wps.points) {
        wp_dist = std::min(wp_dist, planar_dist(end, wp.x, wp.y));
    }
    if (wps.points.empty()) wp_dist = 0.0;

    s.feasible = true;
    s.cost = cfg.weights.goal_dist * planar_dist(end, goal.x, goal.y) +
             cfg.weights.path_dist * wp_dist +
             cfg.weights.obstacle * (max_cost / 254.0) +
             cfg.weights.twirl * std::fabs(traj.command.w);
    return s;
}

PlanResult plan(const RobotState& current, const LocalCostmap& costmap, const WaypointSet& wps,
                const Pose& goal, const DwaConfig& cfg, double dt, bool record_candidates)
{
    const VelocityWindow win = dynamic_window(current.twist, cfg, dt);
    PlanResult out;
    bool have_best = false;
    double best_cost = 0.0;
    Twist best_cmd;

    for (int i = 0; i < cfg.v_samples; ++i) {
        const double fv = cfg.v_samples > 1 ? static_cast<double>(i) / (cfg.v_samples - 1) : 0.0;
        const double v = win.v_lo + fv * (win.v_hi - win.v_lo);
        for (int j = 0; j < cfg.w_samples; ++j) {
            const double fw = cfg.w_samples > 1 ? static_cast<double>(j) / (cfg.w_samples - 1) : 0.0;
            const double w = win.w_lo + fw * (win.w_hi - win.w_lo);
            const Twist cmd{v, w};
            const ArcTrajectory traj = simulate_arc(current.pose, cmd, cfg.sim_time, cfg.sim_step);
            const Score sc = score(traj, costmap, wps, goal, cfg);
            if (record_candidates) out.candidates.push_back({cmd, sc.feasible, sc.cost});
            if (!sc.feasible) continue;

            bool better = false;
            if (!have_best || sc.cost < best_cost) {
                better = true;
            } else if (sc.cost == best_cost) {
                if (std::fabs(cmd.w) < std::fabs(best_cmd.w)) {
                    better = true;
                } else if (std::fabs(cmd.w) == std::fabs(best_cmd.w) && cmd.v > best_cmd.v) {
                    better = true;
                }
            }
            if (better) {
                have_best = true;
                best_cost = sc.cost;
                best_cmd = cmd;
            }
        }
    }

    if (!have_best) {
        out.command = {0.0, cfg.w_max * 0.5};  // rotate-in-place recovery
        out.all_infeasible = true;
        return out;
    }
    out.command = best_cmd;
    return out;
}

}  // namespace hnav::dwa
