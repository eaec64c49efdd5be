#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hnav/geometry.hpp"

namespace hnav {

// Cost conventions shared by every consumer of a grid.
inline constexpr std::uint8_t kCostFree = 0;
inline constexpr std::uint8_t kCostInscribed = 253;  // body overlap certain
inline constexpr std::uint8_t kCostLethal = 254;     // cell itself occupied
inline constexpr std::uint8_t kCostUnknown = 255;

struct GridIndex {
    int x = 0;
    int y = 0;
    bool operator==(const GridIndex&) const = default;
};

// Row-major byte grid. Cell (0,0) sits at the origin corner; y grows upward.
struct OccupancyGrid {
    double resolution = 0.05;  // m per cell
    double origin_x = 0.0;     // world coords of the outer corner of cell (0,0)
    double origin_y = 0.0;
    int width = 0;   // cells
    int height = 0;  // cells
    std::vector<std::uint8_t> cells;

    static OccupancyGrid filled(int w, int h, double res, double ox, double oy,
                                std::uint8_t value = kCostFree);

    bool in_bounds(int ix, int iy) const
    {
        return ix >= 0 && iy >= 0 && ix < width && iy < height;
    }
    std::uint8_t at(int ix, int iy) const { return cells[static_cast<size_t>(iy) * width + ix]; }
    std::uint8_t& at(int ix, int iy) { return cells[static_cast<size_t>(iy) * width + ix]; }

    bool world_to_cell(double wx, double wy, GridIndex& out) const;
    double cell_center_x(int ix) const { return origin_x + (ix + 0.5) * resolution; }
    double cell_center_y(int iy) const { return origin_y + (iy + 0.5) * resolution; }

    // Cost at a world point; out-of-bounds reads as free.
    std::uint8_t cost_at_world(double wx, double wy) const;
};

struct MapFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text map: header "resolution <m> origin <x> <y>", then one row per line,
// '#' occupied, '.' free, '?' unknown. First body line is the top row.
OccupancyGrid load_map_text(const std::string& text);
OccupancyGrid load_map_file(const std::string& path);
std::string save_map_text(const OccupancyGrid& g);

// Run-length pairs (value, count, value, count, ...) per row, bottom row first.
std::vector<std::vector<int>> rle_encode_rows(const OccupancyGrid& g);
void rle_decode_rows(const std::vector<std::vector<int>>& rows, OccupancyGrid& g);

}  // namespace hnav
