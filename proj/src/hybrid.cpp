#include "hnav/hybrid.hpp"

#include <algorithm>
#include <cmath>

namespace hnav::hybrid {

ClearanceStatus ClearanceFilter::update(ClearanceStatus s)
{
    window_.push_back(s);
    while (static_cast<int>(window_.size()) > n_) window_.pop_front();
    int blocked = 0;
    for (const auto st : window_) {
        if (st == ClearanceStatus::Blocked) ++blocked;
    }
    // Missing observations count as Clear: divide by capacity, not fill.
    const double likelihood = static_cast<double>(blocked) / n_;
    return likelihood >= tau_ ? ClearanceStatus::Blocked : ClearanceStatus::Clear;
}

std::vector<GridIndex> rasterize_waypoint_path(const WaypointSet& wps,
                                               const LocalCostmap& costmap,
                                               double robot_radius)
{
    const OccupancyGrid& g = costmap.grid;
    std::vector<char> hit(static_cast<size_t>(g.width) * g.height, 0);

    std::vector<std::pair<double, double>> verts;
    verts.reserve(wps.points.size() + 1);
    verts.emplace_back(costmap.center.x, costmap.center.y);
    for (const auto& wp : wps.points) verts.emplace_back(wp.x, wp.y);

    const double res = g.resolution;
    for (size_t i = 0; i + 1 < verts.size(); ++i) {
        const auto [ax, ay] = verts[i];
        const auto [bx, by] = verts[i + 1];
        const double x_lo = std::min(ax, bx) - robot_radius;
        const double x_hi = std::max(ax, bx) + robot_radius;
        const double y_lo = std::min(ay, by) - robot_radius;
        const double y_hi = std::max(ay, by) + robot_radius;
        const int ix0 = std::max(0, static_cast<int>(std::floor((x_lo - g.origin_x) / res)));
        const int ix1 = std::min(g.width - 1, static_cast<int>(std::floor((x_hi - g.origin_x) / res)));
        const int iy0 = std::max(0, static_cast<int>(std::floor((y_lo - g.origin_y) / res)));
        const int iy1 = std::min(g.height - 1, static_cast<int>(std::floor((y_hi - g.origin_y) / res)));
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double cy = g.cell_center_y(iy);
            for (int ix = ix0; ix <= ix1; ++ix) {
                const size_t idx = static_cast<size_t>(iy) * g.width + ix;
                if (hit[idx]) continue;
                const double cx = g.cell_center_x(ix);
                if (point_segment_dist(cx, cy, ax, ay, bx, by) <= robot_radius) hit[idx] = 1;
            }
        }
    }

    std::vector<GridIndex> cells;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (hit[static_cast<size_t>(iy) * g.width + ix]) cells.push_back({ix, iy});
        }
    }
    return cells;
}

ClearanceStatus detect_clearance(const LocalCostmap& costmap, const WaypointSet& wps,
                                 double robot_radius, std::uint8_t block_threshold)
{
    for (const auto& cell : rasterize_waypoint_path(wps, costmap, robot_radius)) {
        const std::uint8_t c = costmap.grid.at(cell.x, cell.y);
        if (c >= block_threshold) return ClearanceStatus::Blocked;  // unknown is 255
    }
    return ClearanceStatus::Clear;
}

HybridPlanner::HybridPlanner(dwa::DwaConfig dwa_cfg, reactive::PolicyConfig policy_cfg,
                             HybridConfig hybrid_cfg, double robot_radius, double decay_radius,
                             double costmap_side, double costmap_resolution, int polar_rows,
                             int polar_cols, int waypoint_count)
    : dwa_cfg_(dwa_cfg),
      policy_cfg_(policy_cfg),
      hybrid_cfg_(hybrid_cfg),
      robot_radius_(robot_radius),
      decay_radius_(decay_radius),
      costmap_side_(costmap_side),
      costmap_resolution_(costmap_resolution),
      polar_rows_(polar_rows),
      polar_cols_(polar_cols),
      waypoint_count_(waypoint_count),
      filter_(hybrid_cfg.filter_n, hybrid_cfg.tau)
{
}

TickOutput HybridPlanner::tick(const RobotState& state, const OccupancyGrid& observed,
                               const GlobalPlan& plan, const Pose& goal, double dt)
{
    TickOutput out;
    out.costmap = inflate(extract_local(observed, state.pose, costmap_side_, costmap_resolution_),
                          robot_radius_, decay_radius_);
    out.waypoints = downsample_waypoints(plan, out.costmap, waypoint_count_);
    out.goal_waypoint = select_goal_waypoint(out.waypoints);

    // Both planners run every tick; only one command is published. DWA chases
    // a lookahead point on the chain; the raw goal applies only when no
    // waypoints exist.
    const dwa::PlanResult dwa_res = dwa::plan(
        state, out.costmap, out.waypoints,
        path_lookahead_goal(out.waypoints, 0.5 * costmap_side_, goal), dwa_cfg_, dt);
    out.dwa_command = dwa_res.command;

    Pose wp_goal;
    wp_goal.x = out.goal_waypoint.point.x;
    wp_goal.y = out.goal_waypoint.point.y;
    const PolarImage polar = to_polar(out.costmap, wp_goal, polar_rows_, polar_cols_);
    out.reactive_command = reactive::builtin_policy(polar, policy_cfg_);

    HybridDecision d;
    d.clearance = detect_clearance(out.costmap, out.waypoints, robot_radius_,
                                   hybrid_cfg_.block_threshold);
    d.filtered = filter_.update(d.clearance);
    d.filter_fill = filter_.fill();
    d.dwa_all_infeasible = dwa_res.all_infeasible;

    if (d.filtered == ClearanceStatus::Blocked) {
        d.selected = PlannerKind::Reactive;
        d.command = out.reactive_command;
    } else {
        d.selected = PlannerKind::Dwa;
        if (dwa_res.all_infeasible) {
            d.fell_through = true;  // blind recovery spin loses to the reactive command
            d.command = out.reactive_command;
        } else {
            d.command = out.dwa_command;
        }
    }
    out.decision = d;
    return out;
}

}  // namespace hnav::hybrid
