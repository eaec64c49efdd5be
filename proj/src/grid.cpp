#include "hnav/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hnav {

OccupancyGrid OccupancyGrid::filled(int w, int h, double res, double ox, double oy,
                                    std::uint8_t value)
{
    OccupancyGrid g;
    g.resolution = res;
    g.origin_x = ox;
    g.origin_y = oy;
    g.width = w;
    g.height = h;
    g.cells.assign(static_cast<size_t>(w) * h, value);
    return g;
}

bool OccupancyGrid::world_to_cell(double wx, double wy, GridIndex& out) const
{
    const int ix = static_cast<int>(std::floor((wx - origin_x) / resolution));
    const int iy = static_cast<int>(std::floor((wy - origin_y) / resolution));
    out = {ix, iy};
    return in_bounds(ix, iy);
}

std::uint8_t OccupancyGrid::cost_at_world(double wx, double wy) const
{
    GridIndex idx;
    if (!world_to_cell(wx, wy, idx)) return kCostFree;
    return at(idx.x, idx.y);
}

OccupancyGrid load_map_text(const std::string& text)
{
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw MapFormatError("map: empty input");

    std::istringstream hs(header);
    std::string kw_res, kw_origin;
    double res = 0.0, ox = 0.0, oy = 0.0;
    hs >> kw_res >> res >> kw_origin >> ox >> oy;
    if (hs.fail() || kw_res != "resolution" || kw_origin != "origin" || res <= 0.0)
        throw MapFormatError("map: bad header, want 'resolution <m> origin <x> <y>'");

    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw MapFormatError("map: no rows");
    const size_t w = rows[0].size();
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != w)
            throw MapFormatError("map: row " + std::to_string(r) + " width mismatch");
    }

    OccupancyGrid g = OccupancyGrid::filled(static_cast<int>(w), static_cast<int>(rows.size()),
                                            res, ox, oy);
    // First text row is the top of the map.
    for (int iy = 0; iy < g.height; ++iy) {
        const std::string& row = rows[static_cast<size_t>(g.height - 1 - iy)];
        for (int ix = 0; ix < g.width; ++ix) {
            const char c = row[static_cast<size_t>(ix)];
            std::uint8_t v;
            switch (c) {
                case '.': v = kCostFree; break;
                case '#': v = kCostLethal; break;
                case '?': v = kCostUnknown; break;
                default:
                    throw MapFormatError(std::string("map: bad cell char '") + c + "'");
            }
            g.at(ix, iy) = v;
        }
    }
    return g;
}

OccupancyGrid load_map_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw MapFormatError("map: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_map_text(ss.str());
}

std::string save_map_text(const OccupancyGrid& g)
{
    std::ostringstream out;
    out << "resolution " << g.resolution << " origin " << g.origin_x << " " << g.origin_y
        << "\n";
    for (int iy = g.height - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            const std::uint8_t v = g.at(ix, iy);
            out << (v == kCostLethal ? '#' : (v == kCostUnknown ? '?' : '.'));
        }
        out << "\n";
    }
    return out.str();
}

std::vector<std::vector<int>> rle_encode_rows(const OccupancyGrid& g)
{
    std::vector<std::vector<int>> rows;
    rows.reserve(static_cast<size_t>(g.height));
    for (int iy = 0; iy < g.height; ++iy) {
        std::vector<int> row;
        int run_val = -1, run_len = 0;
        for (int ix = 0; ix < g.width; ++ix) {
            const int v = g.at(ix, iy);
            if (v == run_val) {
                ++run_len;
            } else {
                if (run_len > 0) {
                    row.push_back(run_val);
                    row.push_back(run_len);
                }
                run_val = v;
                run_len = 1;
            }
        }
        if (run_len > 0) {
            row.push_back(run_val);
            row.push_back(run_len);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void rle_decode_rows(const std::vector<std::vector<int>>& rows, OccupancyGrid& g)
{
    if (static_cast<int>(rows.size()) != g.height)
        throw MapFormatError("rle: row count mismatch");
    for (int iy = 0; iy < g.height; ++iy) {
        const auto& row = rows[static_cast<size_t>(iy)];
        if (row.size() % 2 != 0) throw MapFormatError("rle: odd pair list");
        int ix = 0;
        for (size_t k = 0; k + 1 < row.size(); k += 2) {
            const int val = row[k], len = row[k + 1];
            if (val < 0 || val > 255 || len <= 0 || ix + len > g.width)
                throw MapFormatError("rle: bad run");
            for (int i = 0; i < len; ++i) g.at(ix++, iy) = static_cast<std::uint8_t>(val);
        }
        if (ix != g.width) throw MapFormatError("rle: row underflow");
    }
}

}  // namespace hnav
