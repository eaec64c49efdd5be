#include "hnav/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "hnav/hybrid.hpp"
#include "hnav/log.hpp"
#include "hnav/rng.hpp"

namespace hnav {

const char* planner_name(PlannerMode m)
{
    switch (m) {
        case PlannerMode::Dwa: return "dwa";
        case PlannerMode::Reactive: return "reactive";
        case PlannerMode::Hybrid: return "hybrid";
    }
    return "unknown";
}

std::optional<PlannerMode> planner_from_name(const std::string& name)
{
    if (name == "dwa") return PlannerMode::Dwa;
    if (name == "reactive") return PlannerMode::Reactive;
    if (name == "hybrid") return PlannerMode::Hybrid;
    return std::nullopt;
}

const char* outcome_label(Outcome o)
{
    switch (o) {
        case Outcome::Reached: return "reached";
        case Outcome::Collided: return "collided";
        case Outcome::Timeout: return "timeout";
    }
    return "unknown";
}

double min_front_distance(const Pose& pose, const OccupancyGrid& observed, double max_range)
{
    double best = max_range;
    for (int iy = 0; iy < observed.height; ++iy) {
        for (int ix = 0; ix < observed.width; ++ix) {
            if (observed.at(ix, iy) != kCostLethal) continue;
            const double dx = observed.cell_center_x(ix) - pose.x;
            const double dy = observed.cell_center_y(iy) - pose.y;
            const double bearing = wrap_angle(std::atan2(dy, dx) - pose.theta);
            if (std::fabs(bearing) > kPi / 4.0) continue;
            best = std::min(best, std::hypot(dx, dy));
        }
    }
    return best;
}

std::optional<double> reaction_time_from(const std::vector<TickRecord>& ticks,
                                         double first_visible_t)
{
    for (size_t k = 0; k + 1 < ticks.size(); ++k) {
        if (std::fabs(ticks[k].cmd.w) > 0.1 && std::fabs(ticks[k + 1].cmd.w) > 0.1) {
            return std::max(0.0, ticks[k].t - first_visible_t);
        }
    }
    return std::nullopt;
}

std::optional<double> reaction_time(const std::vector<TickRecord>& ticks)
{
    for (const auto& tk : ticks) {
        if (tk.obstacle_visible) return reaction_time_from(ticks, tk.t);
    }
    throw ObstacleNeverVisible("no tick ever saw a dynamic obstacle");
}

namespace {

// Extra inflation for global planning only, in meters.
constexpr double kPlanningPad = 0.25;

std::vector<ObstacleDisc> active_obstacles(const Scenario& sc, double t)
{
    std::vector<ObstacleDisc> discs;
    for (const auto& ob : sc.obstacles) {
        if (t < ob.spawn_time) continue;
        const Pose p = obstacle_pose(ob, t);
        discs.push_back({p.x, p.y, ob.radius});
    }
    return discs;
}

struct TickContext {
    LocalCostmap costmap;
    WaypointSet waypoints;
    GoalWaypoint goal_wp;
};

TickContext build_context(const OccupancyGrid& observed, const Pose& pose,
                          const GlobalPlan& plan, const RunConfig& cfg)
{
    TickContext ctx;
    ctx.costmap = inflate(extract_local(observed, pose, cfg.costmap.side, cfg.costmap.resolution),
                          cfg.sim.robot_radius, cfg.costmap.decay_radius);
    ctx.waypoints = downsample_waypoints(plan, ctx.costmap, cfg.waypoint_count);
    ctx.goal_wp = select_goal_waypoint(ctx.waypoints);
    return ctx;
}

// Audit of the selected DWA command against the tick's costmap; counts cells
// the scorer should already have rejected.
int audit_dwa_feasibility(const Pose& pose, const Twist& cmd, const LocalCostmap& costmap,
                          const dwa::DwaConfig& cfg)
{
    const dwa::ArcTrajectory traj = dwa::simulate_arc(pose, cmd, cfg.sim_time, cfg.sim_step);
    for (const Pose& p : traj.poses) {
        if (costmap.grid.cost_at_world(p.x, p.y) >= kCostInscribed) return 1;
    }
    return 0;
}

}  // namespace

EpisodeResult run_episode(const Scenario& sc, PlannerMode mode, std::uint64_t seed)
{
    const RunConfig& cfg = sc.config;

    Pose start = sc.start;
    Pose goal = sc.goal;
    if (sc.alternate_swap && (seed % 2 == 1)) {
        std::swap(start.x, goal.x);
        std::swap(start.y, goal.y);
        start.theta = wrap_angle(sc.start.theta + kPi);  // face back along the route
    }

    EpisodeResult res;
    res.scenario_id = sc.id;
    res.planner = planner_name(mode);
    res.seed = seed;
    res.dynamic_obstacles = !sc.obstacles.empty();
    res.start_used = start;
    res.goal_used = goal;

    // Global plan on the inflated static map, once per episode. Planning pads
    // the footprint so narrow passages resolve to centered paths; execution
    // checks keep the true radius.
    OccupancyGrid planning_map = sc.map;
    inflate_grid(planning_map, cfg.sim.robot_radius + kPlanningPad, cfg.costmap.decay_radius);
    GridIndex start_cell, goal_cell;
    if (!planning_map.world_to_cell(start.x, start.y, start_cell) ||
        !planning_map.world_to_cell(goal.x, goal.y, goal_cell))
        throw ConfigError("start or goal outside the map");
    GlobalPlan plan;
    try {
        plan = plan_dijkstra(planning_map, start_cell, goal_cell);
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("global planning failed: ") + e.what());
    }

    Rng rng(seed);
    hybrid::HybridPlanner hplanner(cfg.dwa, cfg.policy, cfg.hybrid, cfg.sim.robot_radius,
                                   cfg.costmap.decay_radius, cfg.costmap.side,
                                   cfg.costmap.resolution, cfg.costmap.polar_rows,
                                   cfg.costmap.polar_cols, cfg.waypoint_count);

    const VelocityLimits limits{std::min(cfg.dwa.v_min, -cfg.policy.v_back),
                                std::max(cfg.dwa.v_max, cfg.policy.v_max),
                                std::max(cfg.dwa.w_max, cfg.policy.w_max)};
    const int substeps =
        std::max(1, static_cast<int>(std::lround(cfg.sim.control_period / cfg.sim.substep)));
    const double sub_dt = cfg.sim.control_period / substeps;

    RobotState state{start, Twist{}, 0.0};
    bool collided = false;
    bool reached = false;
    int tick = 0;

    while (true) {
        const double t = tick * cfg.sim.control_period;
        if (t >= sc.time_limit - 1e-9) break;  // timeout

        const std::vector<ObstacleDisc> discs = active_obstacles(sc, t);
        const ObservedGrid observed = sense(state, sc.map, discs, cfg.sensor, rng);

        TickRecord rec;
        rec.tick = tick;
        rec.t = t;
        rec.pose = state.pose;
        for (const auto& d : discs) rec.obstacles.emplace_back(d.x, d.y);
        const double half = cfg.costmap.side * 0.5;
        for (const auto& h : observed.hits) {
            if (h.dynamic && std::fabs(h.x - state.pose.x) <= half &&
                std::fabs(h.y - state.pose.y) <= half) {
                rec.obstacle_visible = true;
                break;
            }
        }
        rec.min_front = min_front_distance(state.pose, observed.grid, cfg.sensor.max_range);

        Twist cmd;
        if (mode == PlannerMode::Hybrid) {
            const hybrid::TickOutput out = hplanner.tick(state, observed.grid, plan, goal,
                                                         cfg.sim.control_period);
            cmd = out.decision.command;
            rec.selected = out.decision.selected == hybrid::PlannerKind::Dwa ? 'd' : 'r';
            rec.clearance_blocked = out.decision.clearance == hybrid::ClearanceStatus::Blocked;
            rec.filtered_blocked = out.decision.filtered == hybrid::ClearanceStatus::Blocked;
            rec.filter_fill = out.decision.filter_fill;
            for (const auto st : hplanner.filter().window()) {
                rec.filter_window += st == hybrid::ClearanceStatus::Blocked ? 'B' : 'C';
            }
            rec.dwa_all_infeasible = out.decision.dwa_all_infeasible;
            rec.fell_through = out.decision.fell_through;
            rec.waypoints = out.waypoints.points;
            rec.goal_wp_index = out.goal_waypoint.index;
            rec.degraded = out.goal_waypoint.degraded;
            if (rec.selected == 'd' && !rec.fell_through) {
                res.feasibility_violations +=
                    audit_dwa_feasibility(state.pose, cmd, out.costmap, cfg.dwa);
            }
        } else {
            const TickContext ctx = build_context(observed.grid, state.pose, plan, cfg);
            rec.waypoints = ctx.waypoints.points;
            rec.goal_wp_index = ctx.goal_wp.index;
            rec.degraded = ctx.goal_wp.degraded;
            rec.clearance_blocked =
                hybrid::detect_clearance(ctx.costmap, ctx.waypoints, cfg.sim.robot_radius,
                                         cfg.hybrid.block_threshold) ==
                hybrid::ClearanceStatus::Blocked;
            // Solo planners pursue a lookahead point on the chain; the
            // hybrid's first-clear waypoint rule only matters under the
            // switch.
            const Pose local_goal =
                path_lookahead_goal(ctx.waypoints, 0.5 * cfg.costmap.side, goal);
            if (mode == PlannerMode::Dwa) {
                const dwa::PlanResult out = dwa::plan(state, ctx.costmap, ctx.waypoints,
                                                      local_goal, cfg.dwa, cfg.sim.control_period);
                cmd = out.command;
                rec.selected = 'd';
                rec.dwa_all_infeasible = out.all_infeasible;
                if (!out.all_infeasible) {
                    res.feasibility_violations +=
                        audit_dwa_feasibility(state.pose, cmd, ctx.costmap, cfg.dwa);
                }
            } else {
                const PolarImage polar = to_polar(ctx.costmap, local_goal,
                                                  cfg.costmap.polar_rows, cfg.costmap.polar_cols);
                cmd = reactive::builtin_policy(polar, cfg.policy);
                rec.selected = 'r';
            }
        }
        rec.cmd = cmd;
        if (rec.selected == 'd') {
            ++res.dwa_selected_ticks;
        } else {
            ++res.reactive_selected_ticks;
        }
        res.ticks.push_back(std::move(rec));

        for (int i = 0; i < substeps; ++i) {
            const double t_sub = t + (i + 1) * sub_dt;
            state = step_robot(state, cmd, sub_dt, limits);
            if (check_collision(state.pose, sc.map, active_obstacles(sc, t_sub),
                                cfg.sim.robot_radius)) {
                collided = true;
                break;
            }
        }
        ++tick;
        if (collided) break;
        if (planar_dist(state.pose, goal.x, goal.y) <= cfg.sim.goal_tolerance) {
            reached = true;
            break;
        }
    }

    res.outcome = collided ? Outcome::Collided : (reached ? Outcome::Reached : Outcome::Timeout);
    res.final_pose = state.pose;
    res.nav_time = res.ticks.size() * cfg.sim.control_period;
    double path = 0.0;
    for (size_t k = 1; k < res.ticks.size(); ++k) {
        path += planar_dist(res.ticks[k - 1].pose, res.ticks[k].pose.x, res.ticks[k].pose.y);
    }
    if (!res.ticks.empty()) {
        path += planar_dist(res.ticks.back().pose, res.final_pose.x, res.final_pose.y);
    }
    res.path_length = path;
    res.mean_speed = res.nav_time > 0.0 ? res.path_length / res.nav_time : 0.0;
    if (res.dynamic_obstacles) {
        for (const auto& tk : res.ticks) {
            if (tk.obstacle_visible) {
                res.reaction_time = reaction_time_from(res.ticks, tk.t);
                break;
            }
        }
    }
    return res;
}

std::vector<SummaryRow> aggregate(const std::vector<EpisodeResult>& results)
{
    std::map<std::pair<std::string, std::string>, std::vector<const EpisodeResult*>> buckets;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : results) {
        const auto key = std::make_pair(r.scenario_id, r.planner);
        if (buckets.find(key) == buckets.end()) order.push_back(key);
        buckets[key].push_back(&r);
    }

    std::vector<SummaryRow> rows;
    for (const auto& key : order) {
        const auto& eps = buckets[key];
        SummaryRow row;
        row.scenario_id = key.first;
        row.planner = key.second;
        row.runs = static_cast<int>(eps.size());
        double nav = 0, pathlen = 0, speed = 0, react = 0;
        int nreact = 0;
        for (const auto* e : eps) {
            switch (e->outcome) {
                case Outcome::Reached: ++row.reached; break;
                case Outcome::Collided: ++row.collided; break;
                case Outcome::Timeout: ++row.timeout; break;
            }
            if (e->outcome == Outcome::Reached) {
                nav += e->nav_time;
                pathlen += e->path_length;
                speed += e->mean_speed;
            }
            if (e->reaction_time) {
                react += *e->reaction_time;
                ++nreact;
            }
        }
        row.collision_pct = 100.0 * row.collided / row.runs;
        if (row.reached > 0) {
            row.mean_nav_time = nav / row.reached;
            row.mean_path_length = pathlen / row.reached;
            row.mean_speed = speed / row.reached;
        }
        if (nreact > 0) row.mean_reaction = react / nreact;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string opt_num(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return buf;
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "scenario,planner,runs,reached,collided,timeout,collision_pct,"
           "mean_nav_time_s,mean_path_length_m,mean_speed_mps,mean_reaction_s\n";
    for (const auto& r : rows) {
        char pct[32];
        std::snprintf(pct, sizeof(pct), "%.1f", r.collision_pct);
        out << r.scenario_id << ',' << r.planner << ',' << r.runs << ',' << r.reached << ','
            << r.collided << ',' << r.timeout << ',' << pct << ',' << opt_num(r.mean_nav_time)
            << ',' << opt_num(r.mean_path_length) << ',' << opt_num(r.mean_speed) << ','
            << opt_num(r.mean_reaction) << "\n";
    }
    return out.str();
}

std::string summary_table(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %-9s %5s %8s %10s %9s %9s %9s %9s\n", "scenario",
                  "planner", "runs", "reached", "collision", "time[s]", "path[m]", "speed",
                  "react[s]");
    out << line;
    for (const auto& r : rows) {
        char pct[32];
        std::snprintf(pct, sizeof(pct), "%.0f%%", r.collision_pct);
        std::snprintf(line, sizeof(line), "%-10s %-9s %5d %8d %10s %9s %9s %9s %9s\n",
                      r.scenario_id.c_str(), r.planner.c_str(), r.runs, r.reached, pct,
                      opt_num(r.mean_nav_time).c_str(), opt_num(r.mean_path_length).c_str(),
                      opt_num(r.mean_speed).c_str(), opt_num(r.mean_reaction).c_str());
        out << line;
    }
    return out.str();
}

}  // namespace hnav
