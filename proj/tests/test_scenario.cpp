#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hnav/episode.hpp"
#include "hnav/scenario.hpp"

using namespace hnav;

namespace {

std::filesystem::path test_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "hnav_scenario_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p);
    REQUIRE(f.good());
    f << text;
}

// Bordered rectangular room, written through the text-map round trip.
std::filesystem::path write_room_map(const std::string& name, double w_m, double h_m)
{
    const double res = 0.1;
    const int w = static_cast<int>(std::lround(w_m / res));
    const int h = static_cast<int>(std::lround(h_m / res));
    OccupancyGrid g = OccupancyGrid::filled(w, h, res, 0.0, 0.0);
    for (int ix = 0; ix < w; ++ix) {
        g.at(ix, 0) = kCostLethal;
        g.at(ix, h - 1) = kCostLethal;
    }
    for (int iy = 0; iy < h; ++iy) {
        g.at(0, iy) = kCostLethal;
        g.at(w - 1, iy) = kCostLethal;
    }
    const auto path = test_dir() / name;
    write_file(path, save_map_text(g));
    return path;
}

std::string what_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

void check_same_episode(const EpisodeResult& a, const EpisodeResult& b)
{
    CHECK(a.outcome == b.outcome);
    CHECK(a.nav_time == b.nav_time);
    CHECK(a.path_length == b.path_length);
    CHECK(a.final_pose.x == b.final_pose.x);
    CHECK(a.final_pose.y == b.final_pose.y);
    CHECK(a.final_pose.theta == b.final_pose.theta);
    REQUIRE(a.ticks.size() == b.ticks.size());
    for (size_t i = 0; i < a.ticks.size(); ++i) {
        CHECK(a.ticks[i].pose.x == b.ticks[i].pose.x);
        CHECK(a.ticks[i].pose.y == b.ticks[i].pose.y);
        CHECK(a.ticks[i].cmd.v == b.ticks[i].cmd.v);
        CHECK(a.ticks[i].cmd.w == b.ticks[i].cmd.w);
        CHECK(a.ticks[i].selected == b.ticks[i].selected);
        CHECK(a.ticks[i].min_front == b.ticks[i].min_front);
    }
}

TickRecord tick_at(double t, double w, bool visible = false)
{
    TickRecord r;
    r.t = t;
    r.cmd.w = w;
    r.cmd.v = 0.3;
    r.obstacle_visible = visible;
    return r;
}

}  // namespace

TEST_CASE("scenario text parses every keyword")
{
    const auto map_path = write_room_map("room6x4.map", 6.0, 4.0);
    const std::string text =
        "# cluttered corridor demo\n"
        "id demo\n"
        "map " + map_path.filename().string() + "\n"
        "start 1.0 2.0 0.0\n"
        "goal 5.0 2.0   # on the far side\n"
        "time_limit 30\n"
        "alternate_swap true\n"
        "\n"
        "obstacle 0.25 1.5\n"
        "knot 0.0 3.0 3.0\n"
        "knot 2.0 3.0 1.0\n"
        "set dwa.v_max 0.8\n"
        "set hybrid.filter_n 4\n";

    const Scenario sc = parse_scenario(text, test_dir().string());
    CHECK(sc.id == "demo");
    CHECK(sc.map.width == 60);
    CHECK(sc.map.height == 40);
    CHECK(sc.map.resolution == 0.1);
    CHECK(sc.start.x == 1.0);
    CHECK(sc.start.y == 2.0);
    CHECK(sc.start.theta == 0.0);
    CHECK(sc.goal.x == 5.0);
    CHECK(sc.goal.y == 2.0);
    CHECK(sc.time_limit == 30.0);
    CHECK(sc.alternate_swap);
    REQUIRE(sc.obstacles.size() == 1);
    CHECK(sc.obstacles[0].radius == 0.25);
    CHECK(sc.obstacles[0].spawn_time == 1.5);
    REQUIRE(sc.obstacles[0].knots.size() == 2);
    CHECK(sc.obstacles[0].knots[1].t == 2.0);
    CHECK(sc.config.dwa.v_max == 0.8);
    CHECK(sc.config.hybrid.filter_n == 4);

    // Heading is normalized on the way in.
    const Scenario sc2 = parse_scenario(
        "id t\nmap " + map_path.filename().string() + "\nstart 1 2 7.0\ngoal 5 2\n",
        test_dir().string());
    CHECK(sc2.start.theta == doctest::Approx(wrap_angle(7.0)));
}

TEST_CASE("scenario parse errors carry the offending detail")
{
    const auto map_path = write_room_map("room6x4.map", 6.0, 4.0);
    const std::string base = "map " + map_path.filename().string() + "\nstart 1 2\ngoal 5 2\n";
    const std::string dir = test_dir().string();

    CHECK_THROWS_AS(parse_scenario("start 1 2\ngoal 5 2\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario("map " + map_path.filename().string() + "\ngoal 5 2\n", dir),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "boom 1\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "knot 0 1 1\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "obstacle 0.2 0\nknot 1 1 1\nknot 0.5 2 2\n", dir),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "obstacle 0.2 0\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "obstacle -0.2 0\nknot 0 1 1\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "alternate_swap maybe\n", dir), ConfigError);
    CHECK_THROWS_AS(parse_scenario(base + "time_limit -3\n", dir), ConfigError);

    const std::string msg =
        what_of([&] { parse_scenario(base + "set no.such.key 1\n", dir); });
    CHECK(msg.find("no.such.key") != std::string::npos);

    write_file(test_dir() / "bad.map", "resolution 0.1 origin 0 0\n..X.\n....\n");
    const std::string bad_map =
        what_of([&] { parse_scenario("map bad.map\nstart 1 2\ngoal 5 2\n", dir); });
    CHECK(bad_map.find("bad cell char") != std::string::npos);
}

TEST_CASE("config overrides hit the right fields and reject junk")
{
    RunConfig cfg;
    apply_override(cfg, "dwa.v_max", "0.7");
    CHECK(cfg.dwa.v_max == 0.7);
    apply_override(cfg, "policy.turn_gain", "2.5");
    CHECK(cfg.policy.turn_gain == 2.5);
    apply_override(cfg, "sensor.rays", "180");
    CHECK(cfg.sensor.angular_rays == 180);
    apply_override(cfg, "hybrid.block_threshold", "254");
    CHECK(cfg.hybrid.block_threshold == 254);
    apply_override(cfg, "waypoints.count", "12");
    CHECK(cfg.waypoint_count == 12);

    const std::string unknown = what_of([&] { apply_override(cfg, "dwa.bogus", "1"); });
    CHECK(unknown.find("dwa.bogus") != std::string::npos);
    CHECK_THROWS_AS(apply_override(cfg, "sensor.rays", "0.5"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "dwa.v_max", "fast"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "hybrid.block_threshold", "300"), ConfigError);

    const auto keys = known_override_keys();
    CHECK(std::find(keys.begin(), keys.end(), "dwa.v_max") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "policy.backoff_range") != keys.end());
}

TEST_CASE("episodes are reproducible and metrics are self-consistent")
{
    const auto map_path = write_room_map("room6x4.map", 6.0, 4.0);
    write_file(test_dir() / "plain.scn",
               "id plain\nmap room6x4.map\nstart 1.0 2.0 0.0\ngoal 5.0 2.0\ntime_limit 40\n");
    const Scenario sc = load_scenario((test_dir() / "plain.scn").string());

    const EpisodeResult a = run_episode(sc, PlannerMode::Hybrid, 0);
    const EpisodeResult b = run_episode(sc, PlannerMode::Hybrid, 0);
    check_same_episode(a, b);

    CHECK(a.outcome == Outcome::Reached);
    CHECK(a.nav_time == a.ticks.size() * sc.config.sim.control_period);
    CHECK(a.mean_speed == a.path_length / a.nav_time);
    CHECK(a.dwa_selected_ticks + a.reactive_selected_ticks ==
          static_cast<int>(a.ticks.size()));
    CHECK(!a.reaction_time.has_value());  // static scene
    CHECK(!a.dynamic_obstacles);
    CHECK(a.feasibility_violations == 0);

    double path = 0.0;
    for (size_t k = 1; k < a.ticks.size(); ++k) {
        path += planar_dist(a.ticks[k - 1].pose, a.ticks[k].pose.x, a.ticks[k].pose.y);
    }
    path += planar_dist(a.ticks.back().pose, a.final_pose.x, a.final_pose.y);
    CHECK(a.path_length == path);

    // Same parity, no noise configured: the seed changes nothing.
    const EpisodeResult c = run_episode(sc, PlannerMode::Hybrid, 2);
    check_same_episode(a, c);
}

TEST_CASE("alternate swap flips the route on odd seeds")
{
    write_room_map("room6x4.map", 6.0, 4.0);
    write_file(test_dir() / "swap.scn",
               "id swap\nmap room6x4.map\nstart 1.0 2.0 0.0\ngoal 5.0 2.0\n"
               "time_limit 40\nalternate_swap true\n");
    const Scenario sc = load_scenario((test_dir() / "swap.scn").string());

    const EpisodeResult even = run_episode(sc, PlannerMode::Hybrid, 2);
    CHECK(even.start_used.x == sc.start.x);
    CHECK(even.goal_used.x == sc.goal.x);

    const EpisodeResult odd = run_episode(sc, PlannerMode::Hybrid, 3);
    CHECK(odd.start_used.x == sc.goal.x);
    CHECK(odd.start_used.y == sc.goal.y);
    CHECK(odd.goal_used.x == sc.start.x);
    CHECK(odd.start_used.theta == doctest::Approx(wrap_angle(sc.start.theta + kPi)));
    CHECK(odd.outcome == Outcome::Reached);
}

TEST_CASE("sensor noise makes seeds matter and stays reproducible per seed")
{
    write_room_map("room6x4.map", 6.0, 4.0);
    write_file(test_dir() / "noisy.scn",
               "id noisy\nmap room6x4.map\nstart 1.0 2.0 0.0\ngoal 5.0 2.0\n"
               "time_limit 40\nset sensor.noise_std 0.02\n");
    const Scenario sc = load_scenario((test_dir() / "noisy.scn").string());

    const EpisodeResult a = run_episode(sc, PlannerMode::Hybrid, 0);
    const EpisodeResult b = run_episode(sc, PlannerMode::Hybrid, 0);
    check_same_episode(a, b);

    const EpisodeResult c = run_episode(sc, PlannerMode::Hybrid, 4);
    bool differs = a.ticks.size() != c.ticks.size();
    for (size_t i = 0; !differs && i < a.ticks.size(); ++i) {
        differs = a.ticks[i].min_front != c.ticks[i].min_front ||
                  a.ticks[i].cmd.v != c.ticks[i].cmd.v;
    }
    CHECK(differs);
}

TEST_CASE("bad starts are rejected up front")
{
    write_room_map("room6x4.map", 6.0, 4.0);
    write_file(test_dir() / "wallstart.scn",
               "id ws\nmap room6x4.map\nstart 0.05 0.05 0\ngoal 5 2\ntime_limit 10\n");
    const Scenario in_wall = load_scenario((test_dir() / "wallstart.scn").string());
    CHECK_THROWS_AS(run_episode(in_wall, PlannerMode::Dwa, 0), ConfigError);

    write_file(test_dir() / "offmap.scn",
               "id om\nmap room6x4.map\nstart 1 2 0\ngoal 99 2\ntime_limit 10\n");
    const Scenario off_map = load_scenario((test_dir() / "offmap.scn").string());
    CHECK_THROWS_AS(run_episode(off_map, PlannerMode::Dwa, 0), ConfigError);
}

TEST_CASE("dynamic obstacle is seen and reaction metrics stay consistent")
{
    write_room_map("room6x4.map", 6.0, 4.0);
    // Disc parked just off the route; visible, not blocking.
    write_file(test_dir() / "dyn.scn",
               "id dyn\nmap room6x4.map\nstart 1.0 2.0 0.0\ngoal 5.0 2.0\ntime_limit 40\n"
               "obstacle 0.2 0.5\nknot 0.0 3.0 3.1\n");
    const Scenario sc = load_scenario((test_dir() / "dyn.scn").string());

    const EpisodeResult r = run_episode(sc, PlannerMode::Hybrid, 0);
    CHECK(r.dynamic_obstacles);
    CHECK(r.outcome == Outcome::Reached);

    bool visible = false;
    double first_seen = 0.0;
    for (const auto& tk : r.ticks) {
        if (tk.obstacle_visible) {
            visible = true;
            first_seen = tk.t;
            break;
        }
    }
    REQUIRE(visible);
    const auto recomputed = reaction_time_from(r.ticks, first_seen);
    CHECK(r.reaction_time == recomputed);
    CHECK(r.reaction_time == reaction_time(r.ticks));
}

TEST_CASE("reaction time from constructed logs")
{
    // Turn starts exactly 1 s after visibility; two consecutive ticks qualify.
    std::vector<TickRecord> ticks;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.2 * i;
        ticks.push_back(tick_at(t, t >= 2.0 ? 0.5 : 0.05, t >= 1.0));
    }
    auto rt = reaction_time_from(ticks, 1.0);
    REQUIRE(rt.has_value());
    CHECK(*rt == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reaction_time(ticks) == rt);

    // Already turning before the obstacle shows: clamped to zero.
    std::vector<TickRecord> early;
    for (int i = 0; i < 10; ++i) early.push_back(tick_at(0.2 * i, 0.8, i >= 5));
    auto rt0 = reaction_time_from(early, 1.0);
    REQUIRE(rt0.has_value());
    CHECK(*rt0 == 0.0);

    // Never turns: no value.
    std::vector<TickRecord> straight;
    for (int i = 0; i < 10; ++i) straight.push_back(tick_at(0.2 * i, 0.05, true));
    CHECK(!reaction_time_from(straight, 0.0).has_value());

    // A single spiky tick is not a sustained turn.
    std::vector<TickRecord> spike;
    for (int i = 0; i < 10; ++i) spike.push_back(tick_at(0.2 * i, i == 4 ? 0.9 : 0.05, true));
    CHECK(!reaction_time_from(spike, 0.0).has_value());

    // No tick ever saw the obstacle.
    std::vector<TickRecord> blind;
    for (int i = 0; i < 5; ++i) blind.push_back(tick_at(0.2 * i, 0.5));
    CHECK_THROWS_AS(reaction_time(blind), ObstacleNeverVisible);
}

TEST_CASE("front distance scans only the quarter-circle ahead")
{
    OccupancyGrid g = OccupancyGrid::filled(200, 200, 0.05, 0.0, 0.0);
    const Pose robot{5.025, 5.025, 0.0};

    CHECK(min_front_distance(robot, g, 10.0) == 10.0);

    GridIndex idx;
    // Dead ahead at 2 m.
    REQUIRE(g.world_to_cell(7.025, 5.025, idx));
    g.at(idx.x, idx.y) = kCostLethal;
    CHECK(min_front_distance(robot, g, 10.0) == doctest::Approx(2.0).epsilon(1e-9));

    // At bearing pi/2: outside the sector, ignored.
    OccupancyGrid side = OccupancyGrid::filled(200, 200, 0.05, 0.0, 0.0);
    REQUIRE(side.world_to_cell(5.025, 7.025, idx));
    side.at(idx.x, idx.y) = kCostLethal;
    CHECK(min_front_distance(robot, side, 10.0) == 10.0);

    // Two in-sector returns: the nearer wins; inflated cells do not count.
    REQUIRE(g.world_to_cell(6.525, 5.025, idx));
    g.at(idx.x, idx.y) = kCostLethal;
    REQUIRE(g.world_to_cell(5.525, 5.025, idx));
    g.at(idx.x, idx.y) = kCostInscribed;
    CHECK(min_front_distance(robot, g, 10.0) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("aggregate means, collision percentage, and bucket handling")
{
    EpisodeResult one;
    one.scenario_id = "C9";
    one.planner = "dwa";
    one.outcome = Outcome::Reached;
    one.nav_time = 10.0;
    one.path_length = 5.0;
    one.mean_speed = 0.5;

    auto rows = aggregate({one});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].runs == 1);
    CHECK(rows[0].reached == 1);
    CHECK(rows[0].collision_pct == 0.0);
    CHECK(rows[0].mean_nav_time == 10.0);
    CHECK(rows[0].mean_path_length == 5.0);
    CHECK(rows[0].mean_speed == 0.5);
    CHECK(!rows[0].mean_reaction.has_value());

    // 10 runs, 5 collided: 50%; means over the reached half only.
    std::vector<EpisodeResult> batch;
    for (int i = 0; i < 10; ++i) {
        EpisodeResult r;
        r.scenario_id = "C9";
        r.planner = "hybrid";
        r.outcome = i < 5 ? Outcome::Collided : Outcome::Reached;
        r.nav_time = i < 5 ? 3.0 : 10.0 + i;  // reached: 15..19
        r.path_length = 6.0;
        r.mean_speed = 0.4;
        batch.push_back(r);
    }
    rows = aggregate(batch);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].collision_pct == 50.0);
    CHECK(rows[0].mean_nav_time == doctest::Approx(17.0));
    CHECK(rows[0].runs == 10);

    // Planners without episodes get no row; order follows first appearance.
    batch.push_back(one);
    rows = aggregate(batch);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].planner == "hybrid");
    CHECK(rows[1].planner == "dwa");

    const std::string csv = summary_csv({rows[1]});
    CHECK(csv ==
          "scenario,planner,runs,reached,collided,timeout,collision_pct,"
          "mean_nav_time_s,mean_path_length_m,mean_speed_mps,mean_reaction_s\n"
          "C9,dwa,1,1,0,0,0.0,10.000,5.000,0.500,\n");

    const std::string table = summary_table(rows);
    CHECK(table.find("scenario") == 0);
    CHECK(table.find("hybrid") != std::string::npos);
    CHECK(table.find("50%") != std::string::npos);
}
