#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hnav/geometry.hpp"
#include "hnav/grid.hpp"

namespace hnav {

// Square robot-centred crop, axis-aligned in the world frame. Always an odd
// number of cells per side so the robot cell is the exact centre.
struct LocalCostmap {
    OccupancyGrid grid;
    Pose center;               // robot pose at extraction time
    double side_length = 6.0;  // m

    int center_cell() const { return grid.width / 2; }
    double half_side() const { return grid.width * grid.resolution * 0.5; }
    bool contains_world(double wx, double wy) const
    {
        return std::fabs(wx - center.x) <= half_side() && std::fabs(wy - center.y) <= half_side();
    }
};

LocalCostmap extract_local(const OccupancyGrid& world, const Pose& robot,
                           double side_length, double resolution);

// Exponential inflation around lethal cells: cost(d) = 252*exp(-k(d - r_robot))
// with k = ln(252)/(r_decay - r_robot); d <= r_robot becomes 253, cost reaches
// 1 at r_decay and is 0 beyond it. Unknown cells pass through untouched and
// never act as inflation sources. Idempotent.
void inflate_grid(OccupancyGrid& g, double robot_radius, double decay_radius);
LocalCostmap inflate(LocalCostmap c, double robot_radius, double decay_radius);

// Exact squared euclidean distance transform (two-pass parabola method),
// distances in cells to the nearest seed cell.
std::vector<double> squared_edt(const std::vector<std::uint8_t>& seeds, int w, int h);

struct GoalOutsideWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Angle rows over (-pi, pi], robot heading at the row midline; range columns
// over [0, r_max]. Obstacle channel samples normalized cost at each bin
// centre, goal channel holds a small disc around the goal bin.
struct PolarImage {
    int rows = 64;
    int cols = 64;
    double r_max = 0.0;  // m
    std::vector<float> obstacle;  // rows*cols, row-major, in [0,1]
    std::vector<float> goal;

    float obst(int r, int c) const { return obstacle[static_cast<size_t>(r) * cols + c]; }
    float& obst(int r, int c) { return obstacle[static_cast<size_t>(r) * cols + c]; }
    float goal_at(int r, int c) const { return goal[static_cast<size_t>(r) * cols + c]; }
    float& goal_at(int r, int c) { return goal[static_cast<size_t>(r) * cols + c]; }

    // Bearing of a row centre relative to the robot heading, in (-pi, pi].
    double row_bearing(int r) const;
    double col_range(int c) const { return (c + 0.5) * r_max / cols; }
    int bearing_row(double bearing) const;
    int range_col(double range) const;
};

inline constexpr int kGoalBlobRadiusPx = 2;

// r_max <= 0 selects the default: half the window diagonal.
PolarImage to_polar(const LocalCostmap& c, const Pose& goal, int rows, int cols,
                    double r_max = 0.0);

// Sum over occupied-ish cells near the robot of gaussian(dist)*cost/254,
// truncated at kernel_radius. Unknown contributes nothing.
double kernel_penalty(const LocalCostmap& c, double kernel_radius, double sigma);

// 8-bit binary PGM (P5), row 0 written first. Values scaled from [0,1].
void write_pgm(const std::vector<float>& plane, int rows, int cols, const std::string& path);

}  // namespace hnav
