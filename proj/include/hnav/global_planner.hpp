#pragma once

#include <stdexcept>
#include <vector>

#include "hnav/costmap.hpp"
#include "hnav/geometry.hpp"
#include "hnav/grid.hpp"

namespace hnav {

struct NoPathExists : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StartOrGoalOccupied : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PlanOutsideWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalPlan {
    std::vector<GridIndex> cells;    // 8-connected, start..goal
    std::vector<Pose> world_points;  // cell centres
};

// Minimum-cost 8-connected path; step cost = euclidean step length scaled by
// (1 + destination cost / 255). Cells >= 253 and unknown are untraversable.
// Ties broken by (g, row-major index) so results are platform-stable.
GlobalPlan plan_dijkstra(const OccupancyGrid& grid, GridIndex start, GridIndex goal);

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
    bool on_obstacle = false;
};

struct WaypointSet {
    std::vector<Waypoint> points;  // ordered along the plan
};

// Equal arc-length resampling of the plan portion inside the local window,
// anchored at the plan vertex nearest the robot. on_obstacle flags come from
// the supplied (inflated) costmap at inscribed threshold.
WaypointSet downsample_waypoints(const GlobalPlan& plan, const LocalCostmap& local, int n);

struct GoalWaypoint {
    Waypoint point;
    int index = 0;
    bool degraded = false;  // every waypoint sat on an obstacle
};

// First waypoint in plan order not flagged on_obstacle; falls back to the
// last one (degraded) when all are flagged.
GoalWaypoint select_goal_waypoint(const WaypointSet& wps);

// Pursuit pose for a windowed planner: the first waypoint at least
// `lookahead` arc length along the chain, the last waypoint when the chain
// is shorter, `fallback` when it is empty.
Pose path_lookahead_goal(const WaypointSet& wps, double lookahead, const Pose& fallback);

}  // namespace hnav
