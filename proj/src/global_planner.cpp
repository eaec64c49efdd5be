#include "hnav/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hnav {

namespace {

bool traversable(std::uint8_t cost) { return cost < kCostInscribed; }

struct QueueNode {
    double g;
    int idx;  // row-major
    bool operator>(const QueueNode& o) const
    {
        if (g != o.g) return g > o.g;
        return idx > o.idx;
    }
};

}  // namespace

GlobalPlan plan_dijkstra(const OccupancyGrid& grid, GridIndex start, GridIndex goal)
{
    if (!grid.in_bounds(start.x, start.y) || !grid.in_bounds(goal.x, goal.y) ||
        !traversable(grid.at(start.x, start.y)) || !traversable(grid.at(goal.x, goal.y)))
        throw StartOrGoalOccupied("start or goal cell not traversable");

    const int w = grid.width, h = grid.height;
    const size_t count = static_cast<size_t>(w) * h;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(count, inf);
    std::vector<int> parent(count, -1);
    std::vector<char> settled(count, 0);

    const int start_idx = start.y * w + start.x;
    const int goal_idx = goal.y * w + goal.x;
    std::priority_queue<QueueNode, std::vector<QueueNode>, std::greater<QueueNode>> open;
    g[static_cast<size_t>(start_idx)] = 0.0;
    open.push({0.0, start_idx});

    static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

    while (!open.empty()) {
        const QueueNode top = open.top();
        open.pop();
        if (settled[static_cast<size_t>(top.idx)]) continue;
        settled[static_cast<size_t>(top.idx)] = 1;
        if (top.idx == goal_idx) break;

        const int cx = top.idx % w, cy = top.idx / w;
        for (int k = 0; k < 8; ++k) {
            const int nx = cx + dx8[k], ny = cy + dy8[k];
            if (!grid.in_bounds(nx, ny)) continue;
            const std::uint8_t cost = grid.at(nx, ny);
            if (!traversable(cost)) continue;
            const double step = (k < 4 ? 1.0 : std::sqrt(2.0)) * grid.resolution;
            const double cand = top.g + step * (1.0 + cost / 255.0);
            const int nidx = ny * w + nx;
            if (cand < g[static_cast<size_t>(nidx)]) {
                g[static_cast<size_t>(nidx)] = cand;
                parent[static_cast<size_t>(nidx)] = top.idx;
                open.push({cand, nidx});
            }
        }
    }

    if (!settled[static_cast<size_t>(goal_idx)]) throw NoPathExists("goal unreachable");

    GlobalPlan plan;
    for (int idx = goal_idx; idx != -1; idx = parent[static_cast<size_t>(idx)]) {
        plan.cells.push_back({idx % w, idx / w});
    }
    std::reverse(plan.cells.begin(), plan.cells.end());
    plan.world_points.reserve(plan.cells.size());
    for (const auto& c : plan.cells) {
        Pose p;
        p.x = grid.cell_center_x(c.x);
        p.y = grid.cell_center_y(c.y);
        plan.world_points.push_back(p);
    }
    return plan;
}

namespace {

bool inside_window(const LocalCostmap& local, double x, double y)
{
    return local.contains_world(x, y);
}

// Point where segment a->b crosses the window boundary, given a inside and
// b outside. Smallest positive clip over the four half-planes.
Pose clip_exit(const LocalCostmap& local, const Pose& a, const Pose& b)
{
    const double half = local.half_side();
    const double cx = local.center.x, cy = local.center.y;
    double t_best = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    auto consider = [&](double num, double den) {
        if (den == 0.0) return;
        const double t = num / den;
        if (t >= 0.0 && t < t_best) {
            const double px = a.x + t * dx, py = a.y + t * dy;
            if (std::fabs(px - cx) <= half + 1e-9 && std::fabs(py - cy) <= half + 1e-9)
                t_best = t;
        }
    };
    consider(cx + half - a.x, dx);
    consider(cx - half - a.x, dx);
    consider(cy + half - a.y, dy);
    consider(cy - half - a.y, dy);
    Pose out;
    out.x = a.x + t_best * dx;
    out.y = a.y + t_best * dy;
    return out;
}

}  // namespace

WaypointSet downsample_waypoints(const GlobalPlan& plan, const LocalCostmap& local, int n)
{
    if (plan.world_points.empty()) throw PlanOutsideWindow("empty plan");
    if (n < 2) n = 2;

    // Anchor: plan vertex nearest the robot, nudged forward to the first
    // in-window vertex if the nearest itself fell outside.
    const size_t count = plan.world_points.size();
    size_t anchor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < count; ++i) {
        const double d = planar_dist(plan.world_points[i], local.center.x, local.center.y);
        if (d < best) {
            best = d;
            anchor = i;
        }
    }
    size_t first_in = anchor;
    while (first_in < count &&
           !inside_window(local, plan.world_points[first_in].x, plan.world_points[first_in].y))
        ++first_in;
    if (first_in == count) {
        for (first_in = 0; first_in < count; ++first_in) {
            if (inside_window(local, plan.world_points[first_in].x, plan.world_points[first_in].y))
                break;
        }
        if (first_in == count) throw PlanOutsideWindow("no plan vertex inside local window");
    }

    // Supporting polyline: in-window run from the anchor to exit or plan end.
    std::vector<Pose> support;
    support.push_back(plan.world_points[first_in]);
    for (size_t i = first_in + 1; i < count; ++i) {
        const Pose& p = plan.world_points[i];
        if (inside_window(local, p.x, p.y)) {
            support.push_back(p);
        } else {
            support.push_back(clip_exit(local, support.back(), p));
            break;
        }
    }

    std::vector<double> arc(support.size(), 0.0);
    for (size_t i = 1; i < support.size(); ++i) {
        arc[i] = arc[i - 1] + planar_dist(support[i - 1], support[i].x, support[i].y);
    }
    const double total = arc.back();

    WaypointSet out;
    out.points.reserve(static_cast<size_t>(n));
    size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * k / (n - 1);
        while (seg + 1 < support.size() && arc[seg + 1] < s) ++seg;
        Waypoint wp;
        if (seg + 1 >= support.size()) {
            wp.x = support.back().x;
            wp.y = support.back().y;
        } else {
            const double len = arc[seg + 1] - arc[seg];
            const double u = len > 0.0 ? (s - arc[seg]) / len : 0.0;
            wp.x = support[seg].x + u * (support[seg + 1].x - support[seg].x);
            wp.y = support[seg].y + u * (support[seg + 1].y - support[seg].y);
        }
        const std::uint8_t cost = local.grid.cost_at_world(wp.x, wp.y);
        wp.on_obstacle = cost >= kCostInscribed;  // unknown counts too
        out.points.push_back(wp);
    }
    return out;
}

GoalWaypoint select_goal_waypoint(const WaypointSet& wps)
{
    GoalWaypoint out;
    for (size_t i = 0; i < wps.points.size(); ++i) {
        if (!wps.points[i].on_obstacle) {
            out.point = wps.points[i];
            out.index = static_cast<int>(i);
            out.degraded = false;
            return out;
        }
    }
    out.point = wps.points.back();
    out.index = static_cast<int>(wps.points.size()) - 1;
    out.degraded = true;
    return out;
}

Pose path_lookahead_goal(const WaypointSet& wps, double lookahead, const Pose& fallback)
{
    if (wps.points.empty()) return fallback;
    double run = 0.0;
    std::size_t pick = wps.points.size() - 1;
    for (std::size_t i = 1; i < wps.points.size(); ++i) {
        run += std::hypot(wps.points[i].x - wps.points[i - 1].x,
                          wps.points[i].y - wps.points[i - 1].y);
        if (run >= lookahead) {
            pick = i;
            break;
        }
    }
    Pose p;
    p.x = wps.points[pick].x;
    p.y = wps.points[pick].y;
    p.theta = 0.0;
    return p;
}

}  // namespace hnav
