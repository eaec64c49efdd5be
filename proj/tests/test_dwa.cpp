#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hnav/dwa.hpp"
#include "hnav/rng.hpp"
#include "hnav/world.hpp"

using namespace hnav;
using namespace hnav::dwa;

namespace {

LocalCostmap window_at(const Pose& center, int n, double res)
{
    LocalCostmap lc;
    lc.center = center;
    lc.side_length = n * res;
    lc.grid = OccupancyGrid::filled(n, n, res, center.x - 0.5 * n * res,
                                    center.y - 0.5 * n * res, kCostFree);
    return lc;
}

WaypointSet line_waypoints(double x0, double y0, double x1, double y1, int n)
{
    WaypointSet wps;
    for (int i = 0; i < n; ++i) {
        const double u = double(i) / (n - 1);
        wps.points.push_back({x0 + u * (x1 - x0), y0 + u * (y1 - y0), false});
    }
    return wps;
}

}  // namespace

TEST_CASE("dynamic window box arithmetic")
{
    DwaConfig cfg;  // a_v 1.0, a_w 2.0, v in [-0.5, 1.0], w_max 1.5

    SUBCASE("from rest")
    {
        auto w = dynamic_window(Twist{0.0, 0.0}, cfg, 0.2);
        CHECK(w.v_lo == doctest::Approx(-0.2));
        CHECK(w.v_hi == doctest::Approx(0.2));
        CHECK(w.w_lo == doctest::Approx(-0.4));
        CHECK(w.w_hi == doctest::Approx(0.4));
    }

    SUBCASE("at v_max the upper bound saturates")
    {
        auto w = dynamic_window(Twist{1.0, 0.0}, cfg, 0.2);
        CHECK(w.v_hi == doctest::Approx(1.0));
        CHECK(w.v_lo == doctest::Approx(0.8));
    }

    SUBCASE("tiny dt degenerates to the current twist")
    {
        auto w = dynamic_window(Twist{0.4, -0.3}, cfg, 1e-12);
        CHECK(w.v_lo == doctest::Approx(0.4));
        CHECK(w.v_hi == doctest::Approx(0.4));
        CHECK(w.w_lo == doctest::Approx(-0.3));
        CHECK(w.w_hi == doctest::Approx(-0.3));
    }
}

TEST_CASE("arc rollout matches repeated stepping")
{
    DwaConfig cfg;
    const Twist cmd{0.7, 0.9};
    auto traj = simulate_arc(Pose{1.0, 2.0, 0.5}, cmd, cfg.sim_time, 0.1);

    // Whole steps plus the exact remainder land on sim_time.
    RobotState s;
    s.pose = Pose{1.0, 2.0, 0.5};
    const VelocityLimits wide{-10.0, 10.0, 10.0};
    for (size_t i = 0; i < traj.poses.size(); ++i) {
        const double dt = std::min(0.1, cfg.sim_time - 0.1 * double(i));
        s = step_robot(s, cmd, dt, wide);
        CHECK(std::fabs(traj.poses[i].x - s.pose.x) < 1e-12);
        CHECK(std::fabs(traj.poses[i].y - s.pose.y) < 1e-12);
    }
    CHECK(s.time == doctest::Approx(cfg.sim_time));

    // Single-arc property: constant curvature across consecutive triples.
    const double k_want = cmd.w / cmd.v;
    Pose prev = Pose{1.0, 2.0, 0.5};
    for (const auto& p : traj.poses) {
        const double chord = std::hypot(p.x - prev.x, p.y - prev.y);
        const double dtheta = wrap_angle(p.theta - prev.theta);
        if (chord > 1e-9) {
            // chord = (2/k)*sin(k*arc/2); recover curvature from chord & angle
            const double k_got = 2.0 * std::sin(dtheta / 2.0) / chord;
            CHECK(k_got == doctest::Approx(k_want).epsilon(1e-6));
        }
        prev = p;
    }
}

TEST_CASE("straight arc toward the goal beats a turning one")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    auto wps = line_waypoints(0.0, 0.0, 3.0, 0.0, 8);
    const Pose goal{3.0, 0.0, 0.0};

    auto straight = simulate_arc(Pose{0.0, 0.0, 0.0}, Twist{0.5, 0.0}, cfg.sim_time, 0.1);
    auto turning = simulate_arc(Pose{0.0, 0.0, 0.0}, Twist{0.5, 0.8}, cfg.sim_time, 0.1);

    auto ss = score(straight, lc, wps, goal, cfg);
    auto st = score(turning, lc, wps, goal, cfg);
    REQUIRE(ss.feasible);
    REQUIRE(st.feasible);
    CHECK(ss.cost < st.cost);
}

TEST_CASE("arc through a lethal cell is infeasible")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    // Strip of lethal cells across the path at x ~ 0.5.
    for (int iy = 0; iy < lc.grid.height; ++iy) {
        GridIndex idx;
        REQUIRE(lc.grid.world_to_cell(0.5, lc.grid.cell_center_y(iy), idx));
        lc.grid.at(idx.x, iy) = kCostLethal;
    }
    auto wps = line_waypoints(0.0, 0.0, 3.0, 0.0, 8);
    auto traj = simulate_arc(Pose{0.0, 0.0, 0.0}, Twist{0.8, 0.0}, cfg.sim_time, 0.1);
    auto sc = score(traj, lc, wps, Pose{3.0, 0.0, 0.0}, cfg);
    CHECK_FALSE(sc.feasible);
}

TEST_CASE("twirl term isolates")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    auto wps = line_waypoints(0.0, 0.0, 3.0, 0.0, 8);
    const Pose goal{3.0, 0.0, 0.0};

    // Zero out every term that differs between the two arcs except twirl.
    DwaConfig flat = cfg;
    flat.weights.goal_dist = 0.0;
    flat.weights.path_dist = 0.0;
    flat.weights.obstacle = 0.0;

    auto a = simulate_arc(Pose{0.0, 0.0, 0.0}, Twist{0.5, 0.2}, cfg.sim_time, 0.1);
    auto b = simulate_arc(Pose{0.0, 0.0, 0.0}, Twist{0.5, -0.7}, cfg.sim_time, 0.1);
    auto sa = score(a, lc, wps, goal, flat);
    auto sb = score(b, lc, wps, goal, flat);
    REQUIRE(sa.feasible);
    REQUIRE(sb.feasible);
    CHECK(sb.cost - sa.cost == doctest::Approx(flat.weights.twirl * (0.7 - 0.2)));
}

TEST_CASE("plan drives straight at a dead-ahead goal")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    auto wps = line_waypoints(0.0, 0.0, 2.5, 0.0, 8);
    RobotState s;  // at rest

    auto res = plan(s, lc, wps, Pose{2.5, 0.0, 0.0}, cfg, 0.2);
    REQUIRE_FALSE(res.all_infeasible);
    CHECK(res.command.w == doctest::Approx(0.0));
    // Maximal reachable v from rest over one control period.
    CHECK(res.command.v == doctest::Approx(cfg.a_v * 0.2));
}

TEST_CASE("goal to the left turns left")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    // Waypoint support at the goal; with the support under the robot instead,
    // the path term pins the argmin to standing still.
    WaypointSet wps;
    wps.points.push_back({0.0, 2.5, false});
    RobotState s;

    auto res = plan(s, lc, wps, Pose{0.0, 2.5, 0.0}, cfg, 0.2);
    REQUIRE_FALSE(res.all_infeasible);
    CHECK(res.command.w > 0.0);
}

TEST_CASE("blocked window goes to recovery")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 121, 0.05);
    // Lethal wall surrounding the robot at ~0.15 m: every lattice arc, forward
    // or backward, touches it within sim_time.
    for (int iy = 0; iy < lc.grid.height; ++iy) {
        for (int ix = 0; ix < lc.grid.width; ++ix) {
            const double dx = lc.grid.cell_center_x(ix);
            const double dy = lc.grid.cell_center_y(iy);
            const double d = std::hypot(dx, dy);
            if (d >= 0.15 && d <= 0.35) lc.grid.at(ix, iy) = kCostLethal;
        }
    }
    auto wps = line_waypoints(0.0, 0.0, 2.5, 0.0, 8);
    RobotState s;
    s.twist = Twist{0.5, 0.0};  // moving, so zero-velocity hold is outside the window

    auto res = plan(s, lc, wps, Pose{2.5, 0.0, 0.0}, cfg, 0.2);
    CHECK(res.all_infeasible);
    CHECK(res.command.v == doctest::Approx(0.0));
    CHECK(res.command.w == doctest::Approx(cfg.w_max * 0.5));

    // Exhaustive confirmation: every lattice candidate really is infeasible.
    auto window = dynamic_window(s.twist, cfg, 0.2);
    for (int i = 0; i < cfg.v_samples; ++i) {
        for (int j = 0; j < cfg.w_samples; ++j) {
            const double fv = cfg.v_samples == 1 ? 0.0 : double(i) / (cfg.v_samples - 1);
            const double fw = cfg.w_samples == 1 ? 0.0 : double(j) / (cfg.w_samples - 1);
            const Twist cand{window.v_lo + fv * (window.v_hi - window.v_lo),
                             window.w_lo + fw * (window.w_hi - window.w_lo)};
            auto traj = simulate_arc(s.pose, cand, cfg.sim_time, cfg.sim_step);
            CHECK_FALSE(score(traj, lc, wps, Pose{2.5, 0.0, 0.0}, cfg).feasible);
        }
    }
}

TEST_CASE("weight scaling never changes the argmin")
{
    Rng rng(71);
    DwaConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        auto lc = window_at(Pose{0.0, 0.0, 0.0}, 61, 0.1);
        const int blobs = rng.uniform_int(0, 6);
        for (int b = 0; b < blobs; ++b) {
            const int cx = rng.uniform_int(5, 55), cy = rng.uniform_int(5, 55);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) lc.grid.at(cx + dx, cy + dy) = kCostLethal;
        }
        const double gx = rng.uniform(-2.0, 2.0), gy = rng.uniform(-2.0, 2.0);
        auto wps = line_waypoints(0.0, 0.0, gx, gy, 8);
        RobotState s;
        s.pose.theta = rng.uniform(-3.1, 3.1);
        s.twist = Twist{rng.uniform(-0.3, 0.8), rng.uniform(-1.0, 1.0)};

        auto base = plan(s, lc, wps, Pose{gx, gy, 0.0}, cfg, 0.2);
        DwaConfig scaled = cfg;
        const double m = rng.uniform(0.2, 9.0);
        scaled.weights.goal_dist *= m;
        scaled.weights.path_dist *= m;
        scaled.weights.obstacle *= m;
        scaled.weights.twirl *= m;
        auto again = plan(s, lc, wps, Pose{gx, gy, 0.0}, scaled, 0.2);

        CHECK(base.all_infeasible == again.all_infeasible);
        CHECK(base.command.v == doctest::Approx(again.command.v));
        CHECK(base.command.w == doctest::Approx(again.command.w));
    }
}

TEST_CASE("mirror symmetry negates the turn")
{
    Rng rng(73);
    DwaConfig cfg;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // Scene mirrored across the robot heading axis (x axis, theta = 0).
        auto lc = window_at(Pose{0.0, 0.0, 0.0}, 61, 0.1);
        auto mirrored = lc;
        const int blobs = rng.uniform_int(0, 5);
        for (int b = 0; b < blobs; ++b) {
            const int cx = rng.uniform_int(3, 57), cy = rng.uniform_int(3, 57);
            lc.grid.at(cx, cy) = kCostLethal;
            mirrored.grid.at(cx, 60 - cy) = kCostLethal;
        }
        const double gx = rng.uniform(0.5, 2.5), gy = rng.uniform(-2.0, 2.0);
        auto wps = line_waypoints(0.0, 0.0, gx, gy, 8);
        auto wps_m = line_waypoints(0.0, 0.0, gx, -gy, 8);

        RobotState s;  // at rest, heading +x: the mirror maps the state to itself
        auto a = plan(s, lc, wps, Pose{gx, gy, 0.0}, cfg, 0.2);
        auto b = plan(s, mirrored, wps_m, Pose{gx, -gy, 0.0}, cfg, 0.2);
        if (a.all_infeasible || b.all_infeasible) continue;
        ++checked;

        // w negates up to one lattice step.
        auto window = dynamic_window(s.twist, cfg, 0.2);
        const double w_step = (window.w_hi - window.w_lo) / (cfg.w_samples - 1);
        CHECK(std::fabs(a.command.w + b.command.w) <= w_step + 1e-9);
        CHECK(a.command.v == doctest::Approx(b.command.v).epsilon(1e-9));
    }
    CHECK(checked >= 60);
}

TEST_CASE("candidate records cover the whole lattice")
{
    DwaConfig cfg;
    auto lc = window_at(Pose{0.0, 0.0, 0.0}, 61, 0.1);
    auto wps = line_waypoints(0.0, 0.0, 2.0, 0.0, 8);
    RobotState s;
    auto res = plan(s, lc, wps, Pose{2.0, 0.0, 0.0}, cfg, 0.2, true);
    CHECK(res.candidates.size() == size_t(cfg.v_samples) * cfg.w_samples);
    bool some_infeasible_field = false;
    for (const auto& c : res.candidates) some_infeasible_field = some_infeasible_field || !c.feasible;
    (void)some_infeasible_field;  // presence of the field is the contract here
}
