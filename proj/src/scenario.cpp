#include "hnav/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hnav {

namespace {

double parse_num(const std::string& key, const std::string& value)
{
    try {
        size_t used = 0;
        const double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + value + "' for key '" + key + "'");
    }
}

int parse_int(const std::string& key, const std::string& value)
{
    const double d = parse_num(key, value);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("key '" + key + "' wants an integer, got '" + value + "'");
    return i;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& registry()
{
    static const std::map<std::string, Setter> reg = [] {
        std::map<std::string, Setter> m;
        auto d = [&m](const char* key, double* (*get)(RunConfig&)) {
            m[key] = [get](RunConfig& c, const std::string& k, const std::string& v) {
                *get(c) = parse_num(k, v);
            };
        };
        auto i = [&m](const char* key, int* (*get)(RunConfig&)) {
            m[key] = [get](RunConfig& c, const std::string& k, const std::string& v) {
                *get(c) = parse_int(k, v);
            };
        };
        d("sim.control_period", +[](RunConfig& c) { return &c.sim.control_period; });
        d("sim.substep", +[](RunConfig& c) { return &c.sim.substep; });
        d("sim.robot_radius", +[](RunConfig& c) { return &c.sim.robot_radius; });
        d("sim.goal_tolerance", +[](RunConfig& c) { return &c.sim.goal_tolerance; });
        d("sensor.min_range", +[](RunConfig& c) { return &c.sensor.min_range; });
        d("sensor.max_range", +[](RunConfig& c) { return &c.sensor.max_range; });
        i("sensor.rays", +[](RunConfig& c) { return &c.sensor.angular_rays; });
        d("sensor.noise_std", +[](RunConfig& c) { return &c.sensor.noise_std; });
        d("costmap.side", +[](RunConfig& c) { return &c.costmap.side; });
        d("costmap.resolution", +[](RunConfig& c) { return &c.costmap.resolution; });
        d("costmap.decay_radius", +[](RunConfig& c) { return &c.costmap.decay_radius; });
        i("costmap.polar_rows", +[](RunConfig& c) { return &c.costmap.polar_rows; });
        i("costmap.polar_cols", +[](RunConfig& c) { return &c.costmap.polar_cols; });
        d("dwa.v_min", +[](RunConfig& c) { return &c.dwa.v_min; });
        d("dwa.v_max", +[](RunConfig& c) { return &c.dwa.v_max; });
        d("dwa.w_max", +[](RunConfig& c) { return &c.dwa.w_max; });
        d("dwa.a_v", +[](RunConfig& c) { return &c.dwa.a_v; });
        d("dwa.a_w", +[](RunConfig& c) { return &c.dwa.a_w; });
        d("dwa.sim_time", +[](RunConfig& c) { return &c.dwa.sim_time; });
        d("dwa.sim_step", +[](RunConfig& c) { return &c.dwa.sim_step; });
        i("dwa.v_samples", +[](RunConfig& c) { return &c.dwa.v_samples; });
        i("dwa.w_samples", +[](RunConfig& c) { return &c.dwa.w_samples; });
        d("dwa.w_goal", +[](RunConfig& c) { return &c.dwa.weights.goal_dist; });
        d("dwa.w_path", +[](RunConfig& c) { return &c.dwa.weights.path_dist; });
        d("dwa.w_obstacle", +[](RunConfig& c) { return &c.dwa.weights.obstacle; });
        d("dwa.w_twirl", +[](RunConfig& c) { return &c.dwa.weights.twirl; });
        d("policy.v_max", +[](RunConfig& c) { return &c.policy.v_max; });
        d("policy.v_back", +[](RunConfig& c) { return &c.policy.v_back; });
        d("policy.w_max", +[](RunConfig& c) { return &c.policy.w_max; });
        d("policy.turn_gain", +[](RunConfig& c) { return &c.policy.turn_gain; });
        d("policy.backoff_range", +[](RunConfig& c) { return &c.policy.backoff_range; });
        d("policy.rear_clear", +[](RunConfig& c) { return &c.policy.rear_clear; });
        d("policy.hard_block_range", +[](RunConfig& c) { return &c.policy.hard_block_range; });
        d("policy.influence_range", +[](RunConfig& c) { return &c.policy.influence_range; });
        d("policy.slow_range", +[](RunConfig& c) { return &c.policy.slow_range; });
        d("policy.clearance_weight", +[](RunConfig& c) { return &c.policy.clearance_weight; });
        i("policy.smooth_halfwidth", +[](RunConfig& c) { return &c.policy.smooth_halfwidth; });
        d("policy.goal_slow_gain", +[](RunConfig& c) { return &c.policy.goal_slow_gain; });
        i("hybrid.filter_n", +[](RunConfig& c) { return &c.hybrid.filter_n; });
        d("hybrid.tau", +[](RunConfig& c) { return &c.hybrid.tau; });
        m["hybrid.block_threshold"] = [](RunConfig& c, const std::string& k,
                                         const std::string& v) {
            const int t = parse_int(k, v);
            if (t < 1 || t > 255) throw ConfigError("key '" + k + "' out of range [1,255]");
            c.hybrid.block_threshold = static_cast<std::uint8_t>(t);
        };
        i("waypoints.count", +[](RunConfig& c) { return &c.waypoint_count; });
        return m;
    }();
    return reg;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const auto& reg = registry();
    const auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
}

std::vector<std::string> known_override_keys()
{
    std::vector<std::string> keys;
    for (const auto& [k, v] : registry()) keys.push_back(k);
    return keys;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir)
{
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_map = false, have_start = false, have_goal = false;

    auto fail = [&](const std::string& msg) {
        throw ConfigError("scenario line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;

        if (kw == "id") {
            if (!(ls >> sc.id)) fail("id wants a name");
        } else if (kw == "map") {
            std::string rel;
            if (!(ls >> rel)) fail("map wants a path");
            sc.map_path = base_dir.empty() ? rel : base_dir + "/" + rel;
            try {
                sc.map = load_map_file(sc.map_path);
            } catch (const MapFormatError& e) {
                fail(e.what());
            }
            have_map = true;
        } else if (kw == "start") {
            double x, y, th = 0.0;
            if (!(ls >> x >> y)) fail("start wants x y [theta]");
            ls >> th;
            sc.start = Pose{x, y, wrap_angle(th)};
            have_start = true;
        } else if (kw == "goal") {
            double x, y;
            if (!(ls >> x >> y)) fail("goal wants x y");
            sc.goal = Pose{x, y, 0.0};
            have_goal = true;
        } else if (kw == "time_limit") {
            if (!(ls >> sc.time_limit) || sc.time_limit <= 0) fail("time_limit wants seconds > 0");
        } else if (kw == "alternate_swap") {
            std::string v;
            if (!(ls >> v)) fail("alternate_swap wants true|false");
            if (v == "true" || v == "1") {
                sc.alternate_swap = true;
            } else if (v == "false" || v == "0") {
                sc.alternate_swap = false;
            } else {
                fail("alternate_swap wants true|false");
            }
        } else if (kw == "obstacle") {
            double radius, spawn;
            if (!(ls >> radius >> spawn) || radius <= 0 || spawn < 0)
                fail("obstacle wants radius > 0 and spawn_time >= 0");
            ObstacleScript ob;
            ob.radius = radius;
            ob.spawn_time = spawn;
            sc.obstacles.push_back(ob);
        } else if (kw == "knot") {
            if (sc.obstacles.empty()) fail("knot before any obstacle");
            double t, x, y;
            if (!(ls >> t >> x >> y)) fail("knot wants t x y");
            auto& knots = sc.obstacles.back().knots;
            if (!knots.empty() && t <= knots.back().t) fail("knot times must increase");
            knots.push_back({t, x, y});
        } else if (kw == "set") {
            std::string key, value;
            if (!(ls >> key >> value)) fail("set wants key value");
            try {
                apply_override(sc.config, key, value);
            } catch (const ConfigError& e) {
                fail(e.what());
            }
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }

    if (!have_map) throw ConfigError("scenario: missing map");
    if (!have_start || !have_goal) throw ConfigError("scenario: missing start or goal");
    for (const auto& ob : sc.obstacles) {
        if (ob.knots.empty()) throw ConfigError("scenario: obstacle without knots");
    }
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(ss.str(), dir);
}

}  // namespace hnav
