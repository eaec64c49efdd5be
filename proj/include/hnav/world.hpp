#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hnav/geometry.hpp"
#include "hnav/grid.hpp"
#include "hnav/rng.hpp"

namespace hnav {

struct PoseOutOfBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RobotState {
    Pose pose;
    Twist twist;       // command applied over the last step
    double time = 0.0;  // s
};

struct VelocityLimits {
    double v_min = -0.5;  // m/s
    double v_max = 1.0;
    double w_max = 1.5;  // rad/s
};

// Exact unicycle arc over dt at constant (v, w). Straight-line branch below
// |w| = 1e-6 rad/s; heading stays in (-pi, pi].
Pose integrate_arc(const Pose& p, const Twist& cmd, double dt);

RobotState step_robot(const RobotState& s, const Twist& cmd, double dt,
                      const VelocityLimits& limits);

struct ObstacleKnot {
    double t = 0.0;  // s, absolute sim time
    double x = 0.0;
    double y = 0.0;
};

// Piecewise-linear moving disc. Before the first knot and after the last the
// obstacle holds position. Inactive entirely before spawn_time.
struct ObstacleScript {
    double radius = 0.25;      // m
    double spawn_time = 0.0;   // s
    std::vector<ObstacleKnot> knots;  // strictly increasing t
};

Pose obstacle_pose(const ObstacleScript& s, double t);

struct ObstacleDisc {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.25;
};

struct SensorModel {
    double max_range = 10.0;  // m
    double min_range = 0.4;   // m, closer returns are dropped unseen
    int angular_rays = 360;
    double noise_std = 0.0;   // m, gaussian on measured range
};

struct RayHit {
    double x = 0.0;  // world position of the registered return
    double y = 0.0;
    double range = 0.0;
    bool dynamic = false;  // true when the first hit was a scripted obstacle
};

struct ObservedGrid {
    OccupancyGrid grid;
    std::vector<RayHit> hits;  // registered returns only
};

// Single sweep: rays fan out from the robot heading. A ray's first physical
// hit is registered only when its measured range lands in
// [min_range, max_range]; hits inside min_range vanish without trace.
// Static occupied/unknown cells beyond max_range are copied from the map.
ObservedGrid sense(const RobotState& s, const OccupancyGrid& static_map,
                   std::span<const ObstacleDisc> obstacles, const SensorModel& sensor,
                   Rng& rng);

// Ground-truth body check against the true map and obstacle discs.
// Boundary contact counts as collision.
bool check_collision(const Pose& p, const OccupancyGrid& static_map,
                     std::span<const ObstacleDisc> obstacles, double robot_radius);

}  // namespace hnav
