#pragma once

#include <vector>

#include "hnav/costmap.hpp"
#include "hnav/geometry.hpp"
#include "hnav/global_planner.hpp"
#include "hnav/world.hpp"

namespace hnav::dwa {

struct Weights {
    double goal_dist = 1.0;
    double path_dist = 0.8;
    double obstacle = 2.0;
    double twirl = 0.1;
};

struct DwaConfig {
    double v_min = -0.5;  // m/s
    double v_max = 1.0;
    double w_max = 1.5;   // rad/s
    double a_v = 1.0;     // m/s^2
    double a_w = 2.0;     // rad/s^2
    double sim_time = 1.5;  // s
    double sim_step = 0.1;  // s
    int v_samples = 11;
    int w_samples = 21;
    Weights weights;
};

struct VelocityWindow {
    double v_lo = 0.0;
    double v_hi = 0.0;
    double w_lo = 0.0;
    double w_hi = 0.0;
};

// Velocities reachable from the current twist within dt under accel limits,
// clipped to the configured bounds.
VelocityWindow dynamic_window(const Twist& current, const DwaConfig& cfg, double dt);

struct ArcTrajectory {
    Twist command;
    std::vector<Pose> poses;  // excludes the start pose
    const Pose& terminal() const { return poses.back(); }
};

// Constant-command rollout with the same closed-form integrator the world
// uses; poses sampled every `step` plus the exact sim_time endpoint.
ArcTrajectory simulate_arc(const Pose& start, const Twist& cmd, double sim_time, double step);

struct Score {
    bool feasible = false;
    double cost = 0.0;
};

// cost = goal_dist*d(terminal, goal) + path_dist*d(terminal, nearest wp)
//      + obstacle*(max normalized cell cost along poses) + twirl*|w|.
// Infeasible when any pose touches cost >= 253 (unknown included).
Score score(const ArcTrajectory& traj, const LocalCostmap& costmap, const WaypointSet& wps,
            const Pose& goal, const DwaConfig& cfg);

struct Candidate {
    Twist cmd;
    bool feasible = false;
    double cost = 0.0;
};

struct PlanResult {
    Twist command;
    bool all_infeasible = false;  // command is the rotate-in-place recovery
    std::vector<Candidate> candidates;  // populated only on request
};

// Full lattice sweep over the dynamic window. Tie-break: lower |w|, then
// higher v, then lattice order. AllInfeasible yields (0, +w_max/2).
PlanResult plan(const RobotState& current, const LocalCostmap& costmap, const WaypointSet& wps,
                const Pose& goal, const DwaConfig& cfg, double dt,
                bool record_candidates = false);

}  // namespace hnav::dwa
