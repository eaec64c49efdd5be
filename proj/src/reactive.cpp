#include "hnav/reactive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hnav::reactive {

double reward(const Transition& t, const RewardConfig& cfg)
{
    const double dp = t.d_old - t.d_new;
    const double hp = std::fabs(t.theta_old) - std::fabs(t.theta_new);
    double r = dp * (dp >= 0.0 ? 1.0 : 2.0) + hp * (hp >= 0.0 ? 1.0 : 2.0);
    if (t.collided) r -= cfg.r_max;
    if (t.reached) r += cfg.r_max;
    r -= t.kernel_penalty_new;
    return r;
}

namespace {

// Polar obstacle values at or above this are inscribed/lethal.
constexpr float kBlockedLevel = 0.9956f;  // just below 253/254

struct BinField {
    std::vector<double> nearest;  // m per angle row, r_max when open
    double r_max = 0.0;
};

BinField nearest_per_bin(const PolarImage& s)
{
    BinField f;
    f.r_max = s.r_max;
    f.nearest.assign(static_cast<size_t>(s.rows), s.r_max);
    for (int r = 0; r < s.rows; ++r) {
        for (int c = 0; c < s.cols; ++c) {
            if (s.obst(r, c) >= kBlockedLevel) {
                f.nearest[static_cast<size_t>(r)] = s.col_range(c);
                break;
            }
        }
    }
    return f;
}

}  // namespace

Twist builtin_policy(const PolarImage& s, const PolicyConfig& cfg, PolicyDebug* debug)
{
    // Goal blob: circular mean bearing, mean range.
    double gsin = 0.0, gcos = 0.0, grange = 0.0;
    int gcount = 0;
    for (int r = 0; r < s.rows; ++r) {
        for (int c = 0; c < s.cols; ++c) {
            if (s.goal_at(r, c) > 0.5f) {
                const double b = s.row_bearing(r);
                gsin += std::sin(b);
                gcos += std::cos(b);
                grange += s.col_range(c);
                ++gcount;
            }
        }
    }
    if (gcount == 0) throw NoGoalInState("polar state carries no goal blob");
    const double goal_bearing = std::atan2(gsin, gcos);
    const double goal_range = grange / gcount;

    const BinField field = nearest_per_bin(s);

    auto sector_min = [&](double center, double halfwidth) {
        double m = field.r_max;
        for (int r = 0; r < s.rows; ++r) {
            const double rel = std::fabs(wrap_angle(s.row_bearing(r) - center));
            if (rel <= halfwidth) m = std::min(m, field.nearest[static_cast<size_t>(r)]);
        }
        return m;
    };
    const double front = sector_min(0.0, cfg.front_halfwidth);
    const double rear = sector_min(kPi, cfg.front_halfwidth);

    // A goal at the robot's own cell cannot steer; hold course instead.
    const bool goal_directed = goal_range >= cfg.degenerate_goal_range;
    const double align_center = goal_directed ? goal_bearing : 0.0;

    // Score bins: goal alignment against smoothed obstacle proximity.
    // Obstacles beyond the goal do not repel; the goal region is the target.
    const double relevant =
        goal_directed ? goal_range + 0.3 : std::numeric_limits<double>::infinity();
    auto proximity = [&](double range) {
        if (range >= relevant) return 0.0;
        const double x = 1.0 - range / cfg.influence_range;
        return x > 0.0 ? x * x : 0.0;
    };

    // Fixed passing side breaks head-on symmetry; without it near-tied left
    // and right gaps dither the choice tick to tick.
    const double bias = front < cfg.influence_range ? cfg.side_bias : 0.0;

    int best_bin = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < s.rows; ++r) {
        const double b = s.row_bearing(r);
        double pen = 0.0, wsum = 0.0;
        for (int d = -cfg.smooth_halfwidth; d <= cfg.smooth_halfwidth; ++d) {
            const int rr = ((r + d) % s.rows + s.rows) % s.rows;
            const double wgt = cfg.smooth_halfwidth + 1.0 - std::fabs(d);
            pen += wgt * proximity(field.nearest[static_cast<size_t>(rr)]);
            wsum += wgt;
        }
        pen /= wsum;
        double score = std::cos(wrap_angle(b - align_center)) - cfg.clearance_weight * pen;
        if (b > 0.0) score += bias;
        if (field.nearest[static_cast<size_t>(r)] < cfg.hard_block_range) score -= 5.0;
        if (score > best_score ||
            (score == best_score && best_bin >= 0 &&
             std::fabs(b) < std::fabs(s.row_bearing(best_bin)))) {
            best_score = score;
            best_bin = r;
        }
    }
    const double target = s.row_bearing(best_bin);

    Twist cmd;
    int mode = 0;
    if (front < cfg.backoff_range) {
        if (rear > cfg.rear_clear) {
            mode = 1;
            cmd.v = -cfg.v_back;
            cmd.w = clampd(cfg.turn_gain * target, -cfg.w_max, cfg.w_max);
        } else {
            mode = 2;  // boxed in: rotate toward the chosen gap
            cmd.v = 0.0;
            cmd.w = (target >= 0.0 ? 1.0 : -1.0) * cfg.w_max * 0.5;
        }
    } else {
        cmd.w = clampd(cfg.turn_gain * target, -cfg.w_max, cfg.w_max);
        const double f_turn = std::max(0.0, std::cos(target));
        const double f_clear =
            clampd((front - cfg.hard_block_range) / (cfg.slow_range - cfg.hard_block_range),
                   0.0, 1.0);
        double v = cfg.v_max * f_turn * f_clear;
        if (goal_directed) v = std::min(v, cfg.goal_slow_gain * goal_range);
        cmd.v = v;
    }

    cmd.v = clampd(cmd.v, -cfg.v_back, cfg.v_max);
    cmd.w = clampd(cmd.w, -cfg.w_max, cfg.w_max);
    if (debug) {
        debug->target_bearing = target;
        debug->front_range = front;
        debug->goal_bearing = goal_bearing;
        debug->goal_range = goal_range;
        debug->mode = mode;
    }
    return cmd;
}

EpisodeEnv::EpisodeEnv(EnvConfig cfg) : cfg_(cfg) {}

LocalCostmap EpisodeEnv::local_at(const Pose& p) const
{
    return extract_local(inflated_, p, cfg_.costmap_side, cfg_.costmap_resolution);
}

PolarImage EpisodeEnv::observe() const
{
    LocalCostmap local = local_at(state_.pose);
    // Goal may drift outside the window when the robot wanders; clamp it onto
    // the window box along the same bearing so a blob is always present.
    double gx = goal_.x - state_.pose.x;
    double gy = goal_.y - state_.pose.y;
    const double half = local.half_side() * 0.999;
    const double mag = std::max(std::fabs(gx), std::fabs(gy));
    if (mag > half) {
        const double k = half / mag;
        gx *= k;
        gy *= k;
    }
    Pose g;
    g.x = state_.pose.x + gx;
    g.y = state_.pose.y + gy;
    return to_polar(local, g, cfg_.polar_rows, cfg_.polar_cols);
}

PolarImage EpisodeEnv::reset(std::uint64_t seed)
{
    Rng rng(seed);
    const int n = static_cast<int>(std::lround(cfg_.map_side / cfg_.resolution));

    auto stamp_disc = [&](OccupancyGrid& g, double cx, double cy, double rad) {
        const int x0 = static_cast<int>((cx - rad - g.origin_x) / g.resolution);
        const int x1 = static_cast<int>((cx + rad - g.origin_x) / g.resolution);
        const int y0 = static_cast<int>((cy - rad - g.origin_y) / g.resolution);
        const int y1 = static_cast<int>((cy + rad - g.origin_y) / g.resolution);
        for (int iy = std::max(0, y0); iy <= std::min(g.height - 1, y1); ++iy) {
            for (int ix = std::max(0, x0); ix <= std::min(g.width - 1, x1); ++ix) {
                const double dx = g.cell_center_x(ix) - cx;
                const double dy = g.cell_center_y(iy) - cy;
                if (dx * dx + dy * dy <= rad * rad) g.at(ix, iy) = kCostLethal;
            }
        }
    };
    auto stamp_rect = [&](OccupancyGrid& g, double cx, double cy, double wx, double wy) {
        const int x0 = static_cast<int>((cx - wx / 2 - g.origin_x) / g.resolution);
        const int x1 = static_cast<int>((cx + wx / 2 - g.origin_x) / g.resolution);
        const int y0 = static_cast<int>((cy - wy / 2 - g.origin_y) / g.resolution);
        const int y1 = static_cast<int>((cy + wy / 2 - g.origin_y) / g.resolution);
        for (int iy = std::max(0, y0); iy <= std::min(g.height - 1, y1); ++iy) {
            for (int ix = std::max(0, x0); ix <= std::min(g.width - 1, x1); ++ix) {
                g.at(ix, iy) = kCostLethal;
            }
        }
    };

    while (true) {
        map_ = OccupancyGrid::filled(n, n, cfg_.resolution, 0.0, 0.0);
        for (int ix = 0; ix < n; ++ix) {
            map_.at(ix, 0) = kCostLethal;
            map_.at(ix, n - 1) = kCostLethal;
        }
        for (int iy = 0; iy < n; ++iy) {
            map_.at(0, iy) = kCostLethal;
            map_.at(n - 1, iy) = kCostLethal;
        }

        const double lo = cfg_.placement_margin;
        const double hi = cfg_.map_side - cfg_.placement_margin;
        const int discs = rng.uniform_int(cfg_.min_discs, cfg_.max_discs);
        for (int i = 0; i < discs; ++i) {
            stamp_disc(map_, rng.uniform(lo, hi), rng.uniform(lo, hi),
                       rng.uniform(cfg_.disc_radius_lo, cfg_.disc_radius_hi));
        }
        const int rects = rng.uniform_int(cfg_.min_rects, cfg_.max_rects);
        for (int i = 0; i < rects; ++i) {
            const double len = rng.uniform(cfg_.rect_len_lo, cfg_.rect_len_hi);
            const bool horizontal = rng.bernoulli(0.5);
            stamp_rect(map_, rng.uniform(lo, hi), rng.uniform(lo, hi),
                       horizontal ? len : cfg_.rect_thick,
                       horizontal ? cfg_.rect_thick : len);
        }

        inflated_ = map_;
        inflate_grid(inflated_, cfg_.robot_radius, cfg_.decay_radius);

        auto sample_free = [&](Pose& out, double clearance) {
            for (int tries = 0; tries < 200; ++tries) {
                Pose p;
                p.x = rng.uniform(lo, hi);
                p.y = rng.uniform(lo, hi);
                if (check_collision(p, map_, {}, cfg_.robot_radius + clearance)) continue;
                GridIndex idx;
                if (!inflated_.world_to_cell(p.x, p.y, idx)) continue;
                if (inflated_.at(idx.x, idx.y) >= kCostInscribed) continue;
                out = p;
                return true;
            }
            return false;
        };

        Pose start, goal;
        if (!sample_free(start, cfg_.start_clearance)) continue;
        bool goal_ok = false;
        for (int tries = 0; tries < 200 && !goal_ok; ++tries) {
            if (!sample_free(goal, cfg_.goal_clearance)) break;
            const double d = planar_dist(start, goal.x, goal.y);
            goal_ok = d >= cfg_.separation_lo && d <= cfg_.separation_hi;
        }
        if (!goal_ok) continue;

        start.theta = wrap_angle(rng.uniform(-kPi, kPi));
        state_ = RobotState{start, Twist{}, 0.0};
        goal_ = goal;
        ticks_ = 0;
        done_ = false;
        return observe();
    }
}

StepResult EpisodeEnv::step(const Twist& action)
{
    if (done_) throw StepAfterDone("step after episode end");

    Transition tr;
    tr.d_old = planar_dist(state_.pose, goal_.x, goal_.y);
    tr.theta_old = wrap_angle(std::atan2(goal_.y - state_.pose.y, goal_.x - state_.pose.x) -
                              state_.pose.theta);

    const VelocityLimits bounds{-0.5, 1.0, 2.0};  // generous physical clamp
    const int substeps = std::max(1, static_cast<int>(std::lround(cfg_.control_period / cfg_.substep)));
    bool collided = false;
    for (int i = 0; i < substeps; ++i) {
        state_ = step_robot(state_, action, cfg_.control_period / substeps, bounds);
        if (check_collision(state_.pose, map_, {}, cfg_.robot_radius)) {
            collided = true;
            break;
        }
    }
    ++ticks_;

    tr.d_new = planar_dist(state_.pose, goal_.x, goal_.y);
    tr.theta_new = wrap_angle(std::atan2(goal_.y - state_.pose.y, goal_.x - state_.pose.x) -
                              state_.pose.theta);
    tr.collided = collided;
    tr.reached = !collided && tr.d_new <= cfg_.reward.goal_tolerance;
    tr.kernel_penalty_new =
        kernel_penalty(local_at(state_.pose), cfg_.reward.kernel_radius, cfg_.reward.kernel_sigma);

    StepResult res;
    res.transition = tr;
    res.reward = reward(tr, cfg_.reward);
    if (collided) {
        res.outcome = EnvOutcome::Collided;
    } else if (tr.reached) {
        res.outcome = EnvOutcome::Reached;
    } else if (ticks_ >= cfg_.step_budget) {
        res.outcome = EnvOutcome::Timeout;
    } else {
        res.outcome = EnvOutcome::Running;
    }
    res.done = res.outcome != EnvOutcome::Running;
    done_ = res.done;
    res.state = observe();
    return res;
}

const char* outcome_name(EnvOutcome o)
{
    switch (o) {
        case EnvOutcome::Running: return "running";
        case EnvOutcome::Reached: return "reached";
        case EnvOutcome::Collided: return "collided";
        case EnvOutcome::Timeout: return "timeout";
    }
    return "unknown";
}

std::uint64_t polar_hash(const PolarImage& s)
{
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&](const void* data, size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(s.obstacle.data(), s.obstacle.size() * sizeof(float));
    mix(s.goal.data(), s.goal.size() * sizeof(float));
    return h;
}

void write_transition(std::ostream& out, const PolarImage& state, const Twist& action,
                      double r, EnvOutcome outcome)
{
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "{\"state\":\"%016llx\",\"action\":[%.9g,%.9g],\"reward\":%.9g,"
                  "\"outcome\":\"%s\"}",
                  static_cast<unsigned long long>(polar_hash(state)), action.v, action.w, r,
                  outcome_name(outcome));
    out << buf << "\n";
}

}  // namespace hnav::reactive
