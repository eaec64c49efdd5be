#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hnav/dwa.hpp"
#include "hnav/geometry.hpp"
#include "hnav/grid.hpp"
#include "hnav/hybrid.hpp"
#include "hnav/reactive.hpp"
#include "hnav/world.hpp"

namespace hnav {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double control_period = 0.2;  // s, planner rate 5 Hz
    double substep = 0.02;        // s, physics/collision stepping
    double robot_radius = 0.2;    // m
    double goal_tolerance = 0.15; // m
};

struct CostmapConfig {
    double side = 6.0;         // m
    double resolution = 0.05;  // m/cell
    double decay_radius = 0.8; // m
    int polar_rows = 64;
    int polar_cols = 64;
};

struct RunConfig {
    SimConfig sim;
    SensorModel sensor;
    CostmapConfig costmap;
    dwa::DwaConfig dwa;
    reactive::PolicyConfig policy;
    hybrid::HybridConfig hybrid;
    int waypoint_count = 8;
};

// Applies "<dotted.key> <value>"; unknown keys raise ConfigError naming the
// key, bad values raise ConfigError naming both.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> known_override_keys();

struct Scenario {
    std::string id = "custom";
    std::string map_path;
    OccupancyGrid map;
    Pose start;
    Pose goal;
    double time_limit = 60.0;     // s
    bool alternate_swap = false;  // odd seeds run goal->start
    std::vector<ObstacleScript> obstacles;
    RunConfig config;
};

// Line-oriented text: one "<keyword> args..." per line, '#' comments.
// Keywords: id, map, start, goal, time_limit, alternate_swap, obstacle,
// knot, set. Map paths resolve relative to the scenario file.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir);

}  // namespace hnav
