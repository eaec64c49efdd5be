#pragma once

#include <deque>
#include <vector>

#include "hnav/costmap.hpp"
#include "hnav/dwa.hpp"
#include "hnav/global_planner.hpp"
#include "hnav/reactive.hpp"
#include "hnav/world.hpp"

namespace hnav::hybrid {

enum class ClearanceStatus { Clear, Blocked };
enum class PlannerKind { Dwa, Reactive };

// Last-n status window; missing slots count as Clear, so the empirical
// blocked fraction is blocked_count / n regardless of fill.
class ClearanceFilter {
public:
    explicit ClearanceFilter(int n = 3, double tau = 1.0) : n_(n), tau_(tau) {}

    ClearanceStatus update(ClearanceStatus s);

    int fill() const { return static_cast<int>(window_.size()); }
    int capacity() const { return n_; }
    const std::deque<ClearanceStatus>& window() const { return window_; }  // oldest first

private:
    std::deque<ClearanceStatus> window_;
    int n_;
    double tau_;
};

// Cells whose centre lies within robot_radius of the polyline
// robot -> wp1 -> ... -> wpN (a chain of capsules).
std::vector<GridIndex> rasterize_waypoint_path(const WaypointSet& wps,
                                               const LocalCostmap& costmap,
                                               double robot_radius);

// Blocked iff any swept cell costs >= block_threshold; unknown cells block.
ClearanceStatus detect_clearance(const LocalCostmap& costmap, const WaypointSet& wps,
                                 double robot_radius,
                                 std::uint8_t block_threshold = kCostInscribed);

struct HybridConfig {
    int filter_n = 3;
    double tau = 1.0;
    std::uint8_t block_threshold = kCostInscribed;
};

struct HybridDecision {
    Twist command;
    PlannerKind selected = PlannerKind::Dwa;
    ClearanceStatus clearance = ClearanceStatus::Clear;  // this tick, unfiltered
    ClearanceStatus filtered = ClearanceStatus::Clear;
    int filter_fill = 0;
    bool dwa_all_infeasible = false;
    bool fell_through = false;  // DWA selected but infeasible; reactive emitted
};

// Everything a tick produced, for logging and inspection.
struct TickOutput {
    HybridDecision decision;
    Twist dwa_command;
    Twist reactive_command;
    WaypointSet waypoints;
    GoalWaypoint goal_waypoint;
    LocalCostmap costmap;  // inflated window the decision was made on
};

class HybridPlanner {
public:
    HybridPlanner(dwa::DwaConfig dwa_cfg, reactive::PolicyConfig policy_cfg,
                  HybridConfig hybrid_cfg, double robot_radius, double decay_radius,
                  double costmap_side, double costmap_resolution, int polar_rows,
                  int polar_cols, int waypoint_count);

    // One control tick: window extraction, inflation, waypoints, both
    // planners, clearance filter, selection.
    TickOutput tick(const RobotState& state, const OccupancyGrid& observed,
                    const GlobalPlan& plan, const Pose& goal, double dt);

    const ClearanceFilter& filter() const { return filter_; }

private:
    dwa::DwaConfig dwa_cfg_;
    reactive::PolicyConfig policy_cfg_;
    HybridConfig hybrid_cfg_;
    double robot_radius_;
    double decay_radius_;
    double costmap_side_;
    double costmap_resolution_;
    int polar_rows_;
    int polar_cols_;
    int waypoint_count_;
    ClearanceFilter filter_;
};

}  // namespace hnav::hybrid
