#include "hnav/logio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hnav {

using nlohmann::json;

namespace {

json pose_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }

json config_json(const RunConfig& c)
{
    json j;
    j["sim"] = {{"control_period", c.sim.control_period},
                {"substep", c.sim.substep},
                {"robot_radius", c.sim.robot_radius},
                {"goal_tolerance", c.sim.goal_tolerance}};
    j["sensor"] = {{"max_range", c.sensor.max_range},
                   {"min_range", c.sensor.min_range},
                   {"rays", c.sensor.angular_rays},
                   {"noise_std", c.sensor.noise_std}};
    j["costmap"] = {{"side", c.costmap.side},
                    {"resolution", c.costmap.resolution},
                    {"decay_radius", c.costmap.decay_radius},
                    {"polar_rows", c.costmap.polar_rows},
                    {"polar_cols", c.costmap.polar_cols}};
    j["dwa"] = {{"v_min", c.dwa.v_min},
                {"v_max", c.dwa.v_max},
                {"w_max", c.dwa.w_max},
                {"a_v", c.dwa.a_v},
                {"a_w", c.dwa.a_w},
                {"sim_time", c.dwa.sim_time},
                {"sim_step", c.dwa.sim_step},
                {"v_samples", c.dwa.v_samples},
                {"w_samples", c.dwa.w_samples},
                {"w_goal", c.dwa.weights.goal_dist},
                {"w_path", c.dwa.weights.path_dist},
                {"w_obstacle", c.dwa.weights.obstacle},
                {"w_twirl", c.dwa.weights.twirl}};
    j["policy"] = {{"v_max", c.policy.v_max},
                   {"v_back", c.policy.v_back},
                   {"w_max", c.policy.w_max},
                   {"turn_gain", c.policy.turn_gain},
                   {"backoff_range", c.policy.backoff_range},
                   {"rear_clear", c.policy.rear_clear},
                   {"hard_block_range", c.policy.hard_block_range},
                   {"influence_range", c.policy.influence_range},
                   {"slow_range", c.policy.slow_range},
                   {"clearance_weight", c.policy.clearance_weight},
                   {"smooth_halfwidth", c.policy.smooth_halfwidth},
                   {"goal_slow_gain", c.policy.goal_slow_gain}};
    j["hybrid"] = {{"filter_n", c.hybrid.filter_n},
                   {"tau", c.hybrid.tau},
                   {"block_threshold", static_cast<int>(c.hybrid.block_threshold)}};
    j["waypoints"] = {{"count", c.waypoint_count}};
    return j;
}

}  // namespace

std::vector<std::string> serialize_episode(const Scenario& sc, const EpisodeResult& res)
{
    std::vector<std::string> lines;
    lines.reserve(res.ticks.size() + 2);

    json header;
    header["type"] = "header";
    header["schema"] = kLogSchemaVersion;
    header["scenario"] = res.scenario_id;
    header["planner"] = res.planner;
    header["seed"] = res.seed;
    header["time_limit"] = sc.time_limit;
    header["start"] = pose_json(res.start_used);
    header["goal"] = json::array({res.goal_used.x, res.goal_used.y});
    json map;
    map["resolution"] = sc.map.resolution;
    map["origin"] = json::array({sc.map.origin_x, sc.map.origin_y});
    map["width"] = sc.map.width;
    map["height"] = sc.map.height;
    map["rows"] = rle_encode_rows(sc.map);
    header["map"] = std::move(map);
    json obstacles = json::array();
    for (const auto& ob : sc.obstacles) {
        json knots = json::array();
        for (const auto& k : ob.knots) knots.push_back(json::array({k.t, k.x, k.y}));
        obstacles.push_back({{"radius", ob.radius}, {"spawn", ob.spawn_time},
                             {"knots", std::move(knots)}});
    }
    header["obstacles"] = std::move(obstacles);
    header["config"] = config_json(sc.config);
    lines.push_back(header.dump());

    for (const auto& tk : res.ticks) {
        json t;
        t["type"] = "tick";
        t["k"] = tk.tick;
        t["t"] = tk.t;
        t["pose"] = pose_json(tk.pose);
        t["cmd"] = json::array({tk.cmd.v, tk.cmd.w});
        t["sel"] = std::string(1, tk.selected);
        t["blocked"] = tk.clearance_blocked;
        t["filt"] = tk.filtered_blocked;
        t["fill"] = tk.filter_fill;
        t["win"] = tk.filter_window;
        t["inf"] = tk.dwa_all_infeasible;
        t["fell"] = tk.fell_through;
        json wps = json::array();
        for (const auto& wp : tk.waypoints) {
            wps.push_back(json::array({wp.x, wp.y, wp.on_obstacle ? 1 : 0}));
        }
        t["wps"] = std::move(wps);
        t["gw"] = tk.goal_wp_index;
        t["deg"] = tk.degraded;
        json obs = json::array();
        for (const auto& [ox, oy] : tk.obstacles) obs.push_back(json::array({ox, oy}));
        t["obs"] = std::move(obs);
        t["vis"] = tk.obstacle_visible;
        t["mf"] = tk.min_front;
        lines.push_back(t.dump());
    }

    json s;
    s["type"] = "summary";
    s["outcome"] = outcome_label(res.outcome);
    s["nav_time"] = res.nav_time;
    s["path_length"] = res.path_length;
    s["mean_speed"] = res.mean_speed;
    if (res.reaction_time) {
        s["reaction_time"] = *res.reaction_time;
    } else {
        s["reaction_time"] = nullptr;
    }
    s["final_pose"] = pose_json(res.final_pose);
    s["ticks"] = static_cast<int>(res.ticks.size());
    s["dwa_ticks"] = res.dwa_selected_ticks;
    s["reactive_ticks"] = res.reactive_selected_ticks;
    s["feasibility_violations"] = res.feasibility_violations;
    lines.push_back(s.dump());
    return lines;
}

void write_episode_log(const std::string& path, const std::vector<std::string>& lines)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open log for writing: " + path);
    for (const auto& l : lines) f << l << "\n";
}

namespace {

Pose pose_from(const json& a)
{
    Pose p;
    p.x = a.at(0).get<double>();
    p.y = a.at(1).get<double>();
    if (a.size() > 2) p.theta = a.at(2).get<double>();
    return p;
}

TickRecord tick_from(const json& t)
{
    TickRecord r;
    r.tick = t.at("k").get<int>();
    r.t = t.at("t").get<double>();
    r.pose = pose_from(t.at("pose"));
    r.cmd.v = t.at("cmd").at(0).get<double>();
    r.cmd.w = t.at("cmd").at(1).get<double>();
    r.selected = t.at("sel").get<std::string>().at(0);
    r.clearance_blocked = t.at("blocked").get<bool>();
    r.filtered_blocked = t.at("filt").get<bool>();
    r.filter_fill = t.at("fill").get<int>();
    r.filter_window = t.at("win").get<std::string>();
    r.dwa_all_infeasible = t.at("inf").get<bool>();
    r.fell_through = t.at("fell").get<bool>();
    for (const auto& wp : t.at("wps")) {
        Waypoint w;
        w.x = wp.at(0).get<double>();
        w.y = wp.at(1).get<double>();
        w.on_obstacle = wp.at(2).get<int>() != 0;
        r.waypoints.push_back(w);
    }
    r.goal_wp_index = t.at("gw").get<int>();
    r.degraded = t.at("deg").get<bool>();
    for (const auto& ob : t.at("obs")) {
        r.obstacles.emplace_back(ob.at(0).get<double>(), ob.at(1).get<double>());
    }
    r.obstacle_visible = t.at("vis").get<bool>();
    r.min_front = t.at("mf").get<double>();
    return r;
}

}  // namespace

ReplayData parse_log_lines(const std::vector<std::string>& lines)
{
    ReplayData d;
    if (lines.empty()) throw TruncatedLog("log is empty", -1);

    json header;
    try {
        header = json::parse(lines[0]);
        if (header.at("type").get<std::string>() != "header") throw std::runtime_error("no header");
    } catch (const TruncatedLog&) {
        throw;
    } catch (const std::exception& e) {
        throw TruncatedLog(std::string("log header unreadable: ") + e.what(), -1);
    }

    const int schema = header.value("schema", 0);
    if (schema > kLogSchemaVersion) {
        throw LogSchemaError("log schema version " + std::to_string(schema) +
                             " is newer than supported version " +
                             std::to_string(kLogSchemaVersion));
    }
    if (schema < 1) throw LogSchemaError("log schema version missing");

    try {
        d.scenario_id = header.at("scenario").get<std::string>();
        d.planner = header.at("planner").get<std::string>();
        d.seed = header.at("seed").get<std::uint64_t>();
        d.time_limit = header.at("time_limit").get<double>();
        d.start = pose_from(header.at("start"));
        d.goal = pose_from(header.at("goal"));
        const json& cfg = header.at("config");
        d.control_period = cfg.at("sim").at("control_period").get<double>();
        d.goal_tolerance = cfg.at("sim").at("goal_tolerance").get<double>();
        d.v_min = cfg.at("dwa").at("v_min").get<double>();
        d.v_max = cfg.at("dwa").at("v_max").get<double>();
        d.sensor_max_range = cfg.at("sensor").at("max_range").get<double>();
        const json& m = header.at("map");
        d.map = OccupancyGrid::filled(m.at("width").get<int>(), m.at("height").get<int>(),
                                      m.at("resolution").get<double>(),
                                      m.at("origin").at(0).get<double>(),
                                      m.at("origin").at(1).get<double>());
        std::vector<std::vector<int>> rows;
        for (const auto& row : m.at("rows")) rows.push_back(row.get<std::vector<int>>());
        rle_decode_rows(rows, d.map);
        for (const auto& ob : header.at("obstacles")) {
            ObstacleScript s;
            s.radius = ob.at("radius").get<double>();
            s.spawn_time = ob.at("spawn").get<double>();
            for (const auto& k : ob.at("knots")) {
                s.knots.push_back({k.at(0).get<double>(), k.at(1).get<double>(),
                                   k.at(2).get<double>()});
            }
            d.obstacles.push_back(std::move(s));
        }
    } catch (const std::exception& e) {
        throw TruncatedLog(std::string("log header incomplete: ") + e.what(), -1);
    }

    bool have_summary = false;
    int last_tick = -1;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        json obj;
        std::string type;
        try {
            obj = json::parse(lines[i]);
            type = obj.at("type").get<std::string>();
        } catch (const std::exception&) {
            throw TruncatedLog("log damaged after tick " + std::to_string(last_tick) +
                                   " (line " + std::to_string(i + 1) + ")",
                               last_tick);
        }
        if (type == "tick") {
            try {
                d.ticks.push_back(tick_from(obj));
                last_tick = d.ticks.back().tick;
            } catch (const std::exception&) {
                throw TruncatedLog("log damaged after tick " + std::to_string(last_tick) +
                                       " (line " + std::to_string(i + 1) + ")",
                                   last_tick);
            }
        } else if (type == "summary") {
            try {
                d.outcome = obj.at("outcome").get<std::string>();
                d.nav_time = obj.at("nav_time").get<double>();
                d.path_length = obj.at("path_length").get<double>();
                d.mean_speed = obj.at("mean_speed").get<double>();
                if (!obj.at("reaction_time").is_null()) {
                    d.reaction_time = obj.at("reaction_time").get<double>();
                }
                d.final_pose = pose_from(obj.at("final_pose"));
                d.dwa_ticks = obj.at("dwa_ticks").get<int>();
                d.reactive_ticks = obj.at("reactive_ticks").get<int>();
                d.feasibility_violations = obj.at("feasibility_violations").get<int>();
                const int n = obj.at("ticks").get<int>();
                if (n != static_cast<int>(d.ticks.size())) {
                    throw TruncatedLog("summary expects " + std::to_string(n) + " ticks, log has " +
                                           std::to_string(d.ticks.size()) + "; last valid tick " +
                                           std::to_string(last_tick),
                                       last_tick);
                }
            } catch (const TruncatedLog&) {
                throw;
            } catch (const std::exception& e) {
                throw TruncatedLog(std::string("summary unreadable: ") + e.what(), last_tick);
            }
            have_summary = true;
            break;
        }
    }
    if (!have_summary) {
        throw TruncatedLog("log ends without summary; last valid tick " +
                               std::to_string(last_tick),
                           last_tick);
    }
    return d;
}

ReplayData read_episode_log(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open log: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return parse_log_lines(lines);
}

ReplayMetrics recompute_metrics(const ReplayData& d)
{
    ReplayMetrics m;
    m.ticks = static_cast<int>(d.ticks.size());
    m.nav_time = d.ticks.size() * d.control_period;
    double path = 0.0;
    for (size_t k = 1; k < d.ticks.size(); ++k) {
        path += planar_dist(d.ticks[k - 1].pose, d.ticks[k].pose.x, d.ticks[k].pose.y);
    }
    if (!d.ticks.empty()) {
        path += planar_dist(d.ticks.back().pose, d.final_pose.x, d.final_pose.y);
    }
    m.path_length = path;
    m.mean_speed = m.nav_time > 0.0 ? m.path_length / m.nav_time : 0.0;
    for (const auto& tk : d.ticks) {
        if (tk.selected == 'd') {
            ++m.dwa_ticks;
        } else {
            ++m.reactive_ticks;
        }
    }
    if (!d.obstacles.empty()) {
        for (const auto& tk : d.ticks) {
            if (tk.obstacle_visible) {
                m.reaction_time = reaction_time_from(d.ticks, tk.t);
                break;
            }
        }
    }
    return m;
}

void verify_replay(const ReplayData& d)
{
    const ReplayMetrics m = recompute_metrics(d);
    auto fail = [](const std::string& what) {
        throw LogIntegrityError("replayed metrics disagree with stored summary: " + what);
    };
    if (m.nav_time != d.nav_time) fail("nav_time");
    if (m.path_length != d.path_length) fail("path_length");
    if (m.mean_speed != d.mean_speed) fail("mean_speed");
    if (m.dwa_ticks != d.dwa_ticks) fail("dwa_ticks");
    if (m.reactive_ticks != d.reactive_ticks) fail("reactive_ticks");
    if (m.reaction_time.has_value() != d.reaction_time.has_value()) fail("reaction_time");
    if (m.reaction_time && *m.reaction_time != *d.reaction_time) fail("reaction_time");
}

}  // namespace hnav
