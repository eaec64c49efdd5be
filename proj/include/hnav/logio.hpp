#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hnav/episode.hpp"
#include "hnav/scenario.hpp"

namespace hnav {

inline constexpr int kLogSchemaVersion = 1;

struct LogSchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncatedLog : std::runtime_error {
    explicit TruncatedLog(const std::string& msg, int last_tick)
        : std::runtime_error(msg), last_valid_tick(last_tick)
    {
    }
    int last_valid_tick;  // -1 when even the header is unusable
};

struct LogIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON object per line: header, ticks, summary.
std::vector<std::string> serialize_episode(const Scenario& sc, const EpisodeResult& res);
void write_episode_log(const std::string& path, const std::vector<std::string>& lines);

// Everything a replay needs, decoded from the log alone.
struct ReplayData {
    std::string scenario_id;
    std::string planner;
    std::uint64_t seed = 0;
    double control_period = 0.2;
    double time_limit = 0.0;
    Pose start;
    Pose goal;
    double goal_tolerance = 0.15;
    double v_min = -0.5;  // colormap bounds
    double v_max = 1.0;
    double sensor_max_range = 10.0;
    OccupancyGrid map;
    std::vector<ObstacleScript> obstacles;
    std::vector<TickRecord> ticks;

    // Stored summary fields.
    std::string outcome;
    double nav_time = 0.0;
    double path_length = 0.0;
    double mean_speed = 0.0;
    std::optional<double> reaction_time;
    Pose final_pose;
    int dwa_ticks = 0;
    int reactive_ticks = 0;
    int feasibility_violations = 0;
};

ReplayData parse_log_lines(const std::vector<std::string>& lines);
ReplayData read_episode_log(const std::string& path);

struct ReplayMetrics {
    double nav_time = 0.0;
    double path_length = 0.0;
    double mean_speed = 0.0;
    std::optional<double> reaction_time;
    int ticks = 0;
    int dwa_ticks = 0;
    int reactive_ticks = 0;
};

// Recomputed from tick records and the stored final pose.
ReplayMetrics recompute_metrics(const ReplayData& d);

// Exact comparison of recomputed metrics against the stored summary.
void verify_replay(const ReplayData& d);

}  // namespace hnav
