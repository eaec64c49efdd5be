#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hnav/global_planner.hpp"
#include "hnav/scenario.hpp"
#include "hnav/world.hpp"

namespace hnav {

enum class PlannerMode { Dwa, Reactive, Hybrid };
enum class Outcome { Reached, Collided, Timeout };

const char* planner_name(PlannerMode m);
std::optional<PlannerMode> planner_from_name(const std::string& name);
const char* outcome_label(Outcome o);

struct TickRecord {
    int tick = 0;
    double t = 0.0;  // s at tick start
    Pose pose;       // at tick start
    Twist cmd;       // command emitted this tick
    char selected = 'd';  // 'd' or 'r'
    bool clearance_blocked = false;  // unfiltered status this tick
    bool filtered_blocked = false;
    int filter_fill = 0;
    std::string filter_window;  // oldest..newest, 'C'/'B'
    bool dwa_all_infeasible = false;
    bool fell_through = false;
    std::vector<Waypoint> waypoints;
    int goal_wp_index = 0;
    bool degraded = false;
    std::vector<std::pair<double, double>> obstacles;  // active, at tick start
    bool obstacle_visible = false;  // dynamic return inside the local window
    double min_front = 0.0;         // m
};

struct EpisodeResult {
    std::string scenario_id;
    std::string planner;
    std::uint64_t seed = 0;
    Outcome outcome = Outcome::Timeout;
    double nav_time = 0.0;     // s, ticks * control period
    double path_length = 0.0;  // m
    double mean_speed = 0.0;   // m/s
    std::optional<double> reaction_time;  // s, dynamic scenarios only
    bool dynamic_obstacles = false;
    Pose start_used;  // after any seed swap
    Pose goal_used;
    Pose final_pose;
    int dwa_selected_ticks = 0;
    int reactive_selected_ticks = 0;
    int feasibility_violations = 0;  // audited arc-lethal contacts, expect 0
    std::vector<TickRecord> ticks;
};

struct ObstacleNeverVisible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-loop run at the control rate until goal, ground-truth collision, or
// the scenario time limit. Throws ConfigError when the scenario cannot start
// (bad cells, no global path).
EpisodeResult run_episode(const Scenario& sc, PlannerMode mode, std::uint64_t seed);

// Seconds from first obstacle visibility to the first sustained turn
// (|w| > 0.1 rad/s on two consecutive ticks), clamped at zero.
std::optional<double> reaction_time_from(const std::vector<TickRecord>& ticks,
                                         double first_visible_t);
// Variant deriving visibility from the log; throws ObstacleNeverVisible.
std::optional<double> reaction_time(const std::vector<TickRecord>& ticks);

// Min range over occupied observed cells within +-pi/4 of heading.
double min_front_distance(const Pose& pose, const OccupancyGrid& observed, double max_range);

struct SummaryRow {
    std::string scenario_id;
    std::string planner;
    int runs = 0;
    int reached = 0;
    int collided = 0;
    int timeout = 0;
    double collision_pct = 0.0;
    std::optional<double> mean_nav_time;     // over reached runs
    std::optional<double> mean_path_length;  // over reached runs
    std::optional<double> mean_speed;        // over reached runs
    std::optional<double> mean_reaction;     // over runs that have one
};

std::vector<SummaryRow> aggregate(const std::vector<EpisodeResult>& results);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string summary_table(const std::vector<SummaryRow>& rows);

}  // namespace hnav
