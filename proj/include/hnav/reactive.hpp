#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hnav/costmap.hpp"
#include "hnav/geometry.hpp"
#include "hnav/grid.hpp"
#include "hnav/rng.hpp"
#include "hnav/world.hpp"

namespace hnav::reactive {

struct RewardConfig {
    double r_max = 10.0;          // terminal bonus/penalty magnitude
    double goal_tolerance = 0.15; // m, stands in for "distance reaches zero"
    double kernel_radius = 1.0;   // m, gaussian truncation
    double kernel_sigma = 0.5;    // m
};

struct Transition {
    double d_old = 0.0;  // m to goal waypoint
    double d_new = 0.0;
    double theta_old = 0.0;  // bearing to goal, (-pi, pi]
    double theta_new = 0.0;
    bool collided = false;
    bool reached = false;
    double kernel_penalty_new = 0.0;  // G(s')
};

// Progress term + heading term (penalty doubled when regressing), terminal
// bonus/penalty, minus the gaussian obstacle-proximity penalty.
double reward(const Transition& t, const RewardConfig& cfg);

struct NoGoalInState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolicyConfig {
    double v_max = 0.6;    // m/s forward
    double v_back = 0.25;  // m/s reverse magnitude
    double w_max = 1.5;    // rad/s
    double turn_gain = 1.8;        // w per rad of target bearing
    double backoff_range = 0.6;    // m, front range triggering reverse
    double rear_clear = 0.45;      // m, rear room required to reverse
    double hard_block_range = 0.35;  // m, bins closer than this are shunned
    double influence_range = 1.2;    // m, obstacle proximity horizon
    double slow_range = 1.2;         // m, forward speed tapers below this
    double clearance_weight = 2.0;   // score tradeoff vs goal alignment
    int smooth_halfwidth = 5;        // bins, angular smoothing of proximity
    double front_halfwidth = kPi / 6.0;  // rad, front/rear sector half-angle
    double goal_slow_gain = 1.5;         // v cap per meter of goal distance
    // A goal closer than this carries no usable direction; the policy holds
    // course through open space instead of orbiting its own cell.
    double degenerate_goal_range = 0.25;  // m
    double side_bias = 0.08;  // score nudge toward left bins when front is obstructed
};

struct PolicyDebug {
    double target_bearing = 0.0;
    double front_range = 0.0;
    double goal_bearing = 0.0;
    double goal_range = 0.0;
    int mode = 0;  // 0 drive, 1 reverse, 2 spin
};

// Deterministic gap seeker over the polar state: pick the angular bin that
// best trades goal alignment against obstacle proximity, steer toward it,
// reverse when the front sector is tighter than backoff_range.
Twist builtin_policy(const PolarImage& state, const PolicyConfig& cfg,
                     PolicyDebug* debug = nullptr);

class ReactivePolicy {
public:
    virtual ~ReactivePolicy() = default;
    virtual Twist act(const PolarImage& state) = 0;
};

class GapPolicy final : public ReactivePolicy {
public:
    explicit GapPolicy(PolicyConfig cfg = {}) : cfg_(cfg) {}
    Twist act(const PolarImage& state) override { return builtin_policy(state, cfg_); }
    const PolicyConfig& config() const { return cfg_; }

private:
    PolicyConfig cfg_;
};

enum class EnvOutcome { Running, Reached, Collided, Timeout };

struct EnvConfig {
    double map_side = 8.0;      // m, square synthetic map
    double resolution = 0.05;   // m/cell
    int min_discs = 2;
    int max_discs = 5;
    double disc_radius_lo = 0.15;  // m
    double disc_radius_hi = 0.45;
    int min_rects = 1;
    int max_rects = 3;
    double rect_len_lo = 0.3;   // m, long side
    double rect_len_hi = 1.0;
    double rect_thick = 0.2;    // m, short side
    double placement_margin = 0.6;  // m from the border walls
    double start_clearance = 0.45;  // m body margin for start sampling
    double goal_clearance = 0.85;   // m body margin for goal sampling; must stay
                                    // above backoff_range + goal_tolerance
    double separation_lo = 1.5;     // m start-goal distance band
    double separation_hi = 2.8;
    int step_budget = 200;          // control ticks
    double control_period = 0.2;    // s
    double substep = 0.02;          // s, collision checking
    double robot_radius = 0.2;      // m
    double decay_radius = 0.8;      // m, inflation decay
    double costmap_side = 6.0;      // m, state window
    double costmap_resolution = 0.05;
    int polar_rows = 64;
    int polar_cols = 64;
    RewardConfig reward;
};

struct StepResult {
    PolarImage state;
    double reward = 0.0;
    bool done = false;
    EnvOutcome outcome = EnvOutcome::Running;
    Transition transition;
};

struct StepAfterDone : std::logic_error {
    using std::logic_error::logic_error;
};

// Seeded synthetic training scenes: bordered square room with scattered
// discs and slabs, one robot, one goal waypoint. State is the polar image of
// the inflated local costmap around the robot.
class EpisodeEnv {
public:
    explicit EpisodeEnv(EnvConfig cfg = {});

    PolarImage reset(std::uint64_t seed);
    StepResult step(const Twist& action);

    bool done() const { return done_; }
    const OccupancyGrid& map() const { return map_; }
    const RobotState& robot() const { return state_; }
    const Pose& goal() const { return goal_; }
    int ticks() const { return ticks_; }
    const EnvConfig& config() const { return cfg_; }

private:
    PolarImage observe() const;
    LocalCostmap local_at(const Pose& p) const;

    EnvConfig cfg_;
    OccupancyGrid map_;       // ground truth, lethal walls/obstacles
    OccupancyGrid inflated_;  // same map inflated once per reset
    RobotState state_;
    Pose goal_;
    int ticks_ = 0;
    bool done_ = true;
};

const char* outcome_name(EnvOutcome o);

// One JSON line per transition: state hash, action, reward, outcome.
void write_transition(std::ostream& out, const PolarImage& state, const Twist& action,
                      double reward, EnvOutcome outcome);

std::uint64_t polar_hash(const PolarImage& state);

}  // namespace hnav::reactive
