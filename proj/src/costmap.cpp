#include "hnav/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace hnav {

namespace {
constexpr double kFarAway = 1e18;  // stands in for +inf inside the parabola EDT
}

// One-dimensional squared distance transform (Felzenszwalb/Huttenlocher).
static void dt1d(const std::vector<double>& f, std::vector<double>& d, int n)
{
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.assign(static_cast<size_t>(n), 0);
    z.assign(static_cast<size_t>(n) + 1, 0.0);

    int k = 0;
    v[0] = 0;
    z[0] = -kFarAway;
    z[1] = kFarAway;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + static_cast<double>(q) * q) -
                    (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFarAway;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

std::vector<double> squared_edt(const std::vector<std::uint8_t>& seeds, int w, int h)
{
    std::vector<double> dist(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = seeds[i] ? 0.0 : kFarAway;

    std::vector<double> f(static_cast<size_t>(std::max(w, h)));
    std::vector<double> d(f.size());
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[static_cast<size_t>(y)] = dist[static_cast<size_t>(y) * w + x];
        dt1d(f, d, h);
        for (int y = 0; y < h; ++y) dist[static_cast<size_t>(y) * w + x] = d[static_cast<size_t>(y)];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<size_t>(x)] = dist[static_cast<size_t>(y) * w + x];
        dt1d(f, d, w);
        for (int x = 0; x < w; ++x) dist[static_cast<size_t>(y) * w + x] = d[static_cast<size_t>(x)];
    }
    return dist;
}

LocalCostmap extract_local(const OccupancyGrid& world, const Pose& robot,
                           double side_length, double resolution)
{
    int n = static_cast<int>(std::lround(side_length / resolution));
    if (n < 1) n = 1;
    if (n % 2 == 0) ++n;  // robot must own the exact centre cell

    LocalCostmap out;
    out.center = robot;
    out.side_length = side_length;
    out.grid = OccupancyGrid::filled(n, n, resolution,
                                     robot.x - 0.5 * n * resolution,
                                     robot.y - 0.5 * n * resolution, kCostUnknown);
    for (int iy = 0; iy < n; ++iy) {
        const double wy = out.grid.cell_center_y(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double wx = out.grid.cell_center_x(ix);
            GridIndex src;
            if (world.world_to_cell(wx, wy, src)) {
                out.grid.at(ix, iy) = world.at(src.x, src.y);
            }
        }
    }
    return out;
}

void inflate_grid(OccupancyGrid& g, double robot_radius, double decay_radius)
{
    const size_t count = g.cells.size();
    std::vector<std::uint8_t> seeds(count, 0);
    bool any = false;
    for (size_t i = 0; i < count; ++i) {
        if (g.cells[i] == kCostLethal) {
            seeds[i] = 1;
            any = true;
        }
    }
    if (!any) return;

    // Radius comparisons happen in squared-cell space, where EDT output is an
    // exact integer: a cell exactly robot_radius away must come out inscribed,
    // and one exactly decay_radius away must keep cost 1.
    const std::vector<double> d2 = squared_edt(seeds, g.width, g.height);
    const double in2 = std::pow(robot_radius / g.resolution, 2) + 1e-6;
    const double out2 = std::pow(decay_radius / g.resolution, 2) + 1e-6;
    const double k = std::log(252.0) / (decay_radius - robot_radius);
    for (size_t i = 0; i < count; ++i) {
        const std::uint8_t cur = g.cells[i];
        if (cur == kCostLethal || cur == kCostUnknown) continue;  // sources and unknown persist
        if (d2[i] <= in2) {
            g.cells[i] = kCostInscribed;
        } else if (d2[i] <= out2) {
            const double d = std::sqrt(d2[i]) * g.resolution;
            const long c = std::lround(252.0 * std::exp(-k * (d - robot_radius)));
            g.cells[i] = static_cast<std::uint8_t>(std::clamp(c, 1L, 252L));
        } else {
            g.cells[i] = kCostFree;
        }
    }
}

LocalCostmap inflate(LocalCostmap c, double robot_radius, double decay_radius)
{
    inflate_grid(c.grid, robot_radius, decay_radius);
    return c;
}

double PolarImage::row_bearing(int r) const
{
    return -kPi + (r + 0.5) * (2.0 * kPi / rows);
}

int PolarImage::bearing_row(double bearing) const
{
    const int r = static_cast<int>(std::floor((bearing + kPi) / (2.0 * kPi) * rows));
    return std::clamp(r, 0, rows - 1);
}

int PolarImage::range_col(double range) const
{
    const int c = static_cast<int>(std::floor(range / r_max * cols));
    return std::clamp(c, 0, cols - 1);
}

PolarImage to_polar(const LocalCostmap& c, const Pose& goal, int rows, int cols, double r_max)
{
    PolarImage img;
    img.rows = rows;
    img.cols = cols;
    const double side = c.grid.width * c.grid.resolution;
    img.r_max = r_max > 0.0 ? r_max : side * std::sqrt(2.0) * 0.5;
    img.obstacle.assign(static_cast<size_t>(rows) * cols, 0.0f);
    img.goal.assign(static_cast<size_t>(rows) * cols, 0.0f);

    const double gx = goal.x - c.center.x;
    const double gy = goal.y - c.center.y;
    const double half = c.half_side();
    const double slack = 1e-9;
    if (std::fabs(gx) > half + slack || std::fabs(gy) > half + slack)
        throw GoalOutsideWindow("goal outside local window");

    // Inverse warp: each bin centre samples the costmap at its world point.
    // Every lit pixel therefore maps back inside an occupied cell, whatever
    // the bin-to-cell size ratio.
    const int cc = c.center_cell();
    for (int r = 0; r < rows; ++r) {
        const double ang = c.center.theta + img.row_bearing(r);
        const double cs = std::cos(ang);
        const double sn = std::sin(ang);
        for (int col = 0; col < cols; ++col) {
            const double range = img.col_range(col);
            GridIndex idx;
            if (!c.grid.world_to_cell(c.center.x + range * cs, c.center.y + range * sn, idx))
                continue;
            if (idx.x == cc && idx.y == cc) continue;  // robot's own cell has no bearing
            const std::uint8_t cost = c.grid.at(idx.x, idx.y);
            if (cost == kCostFree || cost == kCostUnknown) continue;  // unknown reads free here
            img.obst(r, col) = static_cast<float>(cost / 254.0);
        }
    }

    const double gb = (gx == 0.0 && gy == 0.0)
                          ? 0.0
                          : wrap_angle(std::atan2(gy, gx) - c.center.theta);
    const double gr = std::hypot(gx, gy);
    const int grow = img.bearing_row(gb);
    const int gcol = img.range_col(std::min(gr, img.r_max));
    for (int dr = -kGoalBlobRadiusPx; dr <= kGoalBlobRadiusPx; ++dr) {
        for (int dc = -kGoalBlobRadiusPx; dc <= kGoalBlobRadiusPx; ++dc) {
            if (dr * dr + dc * dc > kGoalBlobRadiusPx * kGoalBlobRadiusPx) continue;
            const int rr = ((grow + dr) % rows + rows) % rows;  // angle wraps
            const int cc2 = gcol + dc;                          // range clips
            if (cc2 < 0 || cc2 >= cols) continue;
            img.goal_at(rr, cc2) = 1.0f;
        }
    }
    return img;
}

double kernel_penalty(const LocalCostmap& c, double kernel_radius, double sigma)
{
    double sum = 0.0;
    const double r2 = kernel_radius * kernel_radius;
    for (int iy = 0; iy < c.grid.height; ++iy) {
        for (int ix = 0; ix < c.grid.width; ++ix) {
            const std::uint8_t cost = c.grid.at(ix, iy);
            if (cost == kCostFree || cost == kCostUnknown) continue;
            const double dx = c.grid.cell_center_x(ix) - c.center.x;
            const double dy = c.grid.cell_center_y(iy) - c.center.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > r2) continue;  // truncated kernel
            sum += std::exp(-d2 / (2.0 * sigma * sigma)) * (cost / 254.0);
        }
    }
    return sum;
}

void write_pgm(const std::vector<float>& plane, int rows, int cols, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("pgm: cannot open " + path);
    f << "P5\n" << cols << " " << rows << "\n255\n";
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const float v = plane[static_cast<size_t>(r) * cols + c];
            const int byte = std::clamp(static_cast<int>(std::lround(v * 255.0f)), 0, 255);
            f.put(static_cast<char>(byte));
        }
    }
}

}  // namespace hnav
