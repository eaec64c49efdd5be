#include "hnav/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hnav {

namespace {

constexpr double kPxPerMeter = 100.0;
constexpr double kMargin = 24.0;  // px

struct Mapper {
    double origin_x, top_y;

    double px(double x) const { return kMargin + (x - origin_x) * kPxPerMeter; }
    double py(double y) const { return kMargin + (top_y - y) * kPxPerMeter; }
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

// Linear blue -> red sweep over [v_min, v_max].
std::string speed_color(double v, double v_min, double v_max)
{
    double u = v_max > v_min ? (v - v_min) / (v_max - v_min) : 0.5;
    u = clampd(u, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + u * (200 - 40)));
    const int g = static_cast<int>(std::lround(60 + (1.0 - std::fabs(u - 0.5) * 2.0) * 80));
    const int b = static_cast<int>(std::lround(200 - u * (200 - 40)));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string render_svg(const ReplayData& d)
{
    const OccupancyGrid& map = d.map;
    const double res = map.resolution;
    const double top_y = map.origin_y + map.height * res;
    const Mapper m{map.origin_x, top_y};
    const double w_px = map.width * res * kPxPerMeter + 2 * kMargin;
    const double h_px = map.height * res * kPxPerMeter + 2 * kMargin;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w_px) << "\" height=\""
        << fmt(h_px) << "\" viewBox=\"0 0 " << fmt(w_px) << " " << fmt(h_px) << "\">\n";
    out << "<!-- trajectory stroke encodes commanded linear velocity: blue at v_min="
        << fmt(d.v_min) << " m/s, red at v_max=" << fmt(d.v_max)
        << " m/s (linear sweep); thick black-bordered circles mark ticks where the"
           " reactive planner was selected -->\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w_px) << "\" height=\"" << fmt(h_px)
        << "\" fill=\"#ffffff\"/>\n";

    // Static map: one rect per occupied/unknown run.
    out << "<g stroke=\"none\">\n";
    for (int iy = 0; iy < map.height; ++iy) {
        int ix = 0;
        while (ix < map.width) {
            const std::uint8_t v = map.at(ix, iy);
            int run = 1;
            while (ix + run < map.width && map.at(ix + run, iy) == v) ++run;
            if (v == kCostLethal || v == kCostUnknown) {
                const double x0 = map.origin_x + ix * res;
                const double y1 = map.origin_y + (iy + 1) * res;
                out << "<rect x=\"" << fmt(m.px(x0)) << "\" y=\"" << fmt(m.py(y1)) << "\" width=\""
                    << fmt(run * res * kPxPerMeter) << "\" height=\"" << fmt(res * kPxPerMeter)
                    << "\" fill=\"" << (v == kCostLethal ? "#3d3d3d" : "#d8d8d8") << "\"/>\n";
            }
            ix += run;
        }
    }
    out << "</g>\n";

    // Scripted obstacle paths and their per-tick positions.
    for (const auto& ob : d.obstacles) {
        if (ob.knots.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1.5\""
                   " stroke-dasharray=\"6 4\" points=\"";
            for (size_t i = 0; i < ob.knots.size(); ++i) {
                if (i) out << " ";
                out << fmt(m.px(ob.knots[i].x)) << "," << fmt(m.py(ob.knots[i].y));
            }
            out << "\"/>\n";
        }
    }
    out << "<g fill=\"#e08030\" fill-opacity=\"0.08\" stroke=\"none\">\n";
    for (const auto& tk : d.ticks) {
        if (tk.tick % 5 != 0) continue;
        for (size_t i = 0; i < tk.obstacles.size(); ++i) {
            // Radii follow scenario order of the spawned scripts.
            size_t active = 0;
            double radius = 0.25;
            for (const auto& ob : d.obstacles) {
                if (tk.t >= ob.spawn_time) {
                    if (active == i) {
                        radius = ob.radius;
                        break;
                    }
                    ++active;
                }
            }
            out << "<circle cx=\"" << fmt(m.px(tk.obstacles[i].first)) << "\" cy=\""
                << fmt(m.py(tk.obstacles[i].second)) << "\" r=\""
                << fmt(radius * kPxPerMeter) << "\"/>\n";
        }
    }
    out << "</g>\n";
    if (!d.ticks.empty() && !d.ticks.back().obstacles.empty()) {
        const auto& last = d.ticks.back();
        size_t active = 0;
        for (const auto& ob : d.obstacles) {
            if (last.t >= ob.spawn_time) {
                if (active < last.obstacles.size()) {
                    out << "<circle cx=\"" << fmt(m.px(last.obstacles[active].first)) << "\" cy=\""
                        << fmt(m.py(last.obstacles[active].second)) << "\" r=\""
                        << fmt(ob.radius * kPxPerMeter)
                        << "\" fill=\"#e08030\" fill-opacity=\"0.5\" stroke=\"#a05010\""
                           " stroke-width=\"1.5\"/>\n";
                }
                ++active;
            }
        }
    }

    // Goal and start.
    out << "<circle cx=\"" << fmt(m.px(d.goal.x)) << "\" cy=\"" << fmt(m.py(d.goal.y)) << "\" r=\""
        << fmt(d.goal_tolerance * kPxPerMeter)
        << "\" fill=\"none\" stroke=\"#20a020\" stroke-width=\"2\" stroke-dasharray=\"3 3\"/>\n";
    out << "<circle cx=\"" << fmt(m.px(d.goal.x)) << "\" cy=\"" << fmt(m.py(d.goal.y))
        << "\" r=\"4.0\" fill=\"#20a020\"/>\n";
    out << "<circle cx=\"" << fmt(m.px(d.start.x)) << "\" cy=\"" << fmt(m.py(d.start.y))
        << "\" r=\"5.0\" fill=\"none\" stroke=\"#2060c0\" stroke-width=\"2\"/>\n";

    // Trajectory, one segment per tick.
    out << "<g fill=\"none\" stroke-width=\"2.5\" stroke-linecap=\"round\">\n";
    for (size_t k = 0; k < d.ticks.size(); ++k) {
        const Pose& a = d.ticks[k].pose;
        const Pose& b = (k + 1 < d.ticks.size()) ? d.ticks[k + 1].pose : d.final_pose;
        out << "<line x1=\"" << fmt(m.px(a.x)) << "\" y1=\"" << fmt(m.py(a.y)) << "\" x2=\""
            << fmt(m.px(b.x)) << "\" y2=\"" << fmt(m.py(b.y)) << "\" stroke=\""
            << speed_color(d.ticks[k].cmd.v, d.v_min, d.v_max) << "\"/>\n";
    }
    out << "</g>\n";

    // Reactive-selected ticks get the thick-bordered circles.
    out << "<g stroke=\"#000000\" stroke-width=\"2.2\">\n";
    for (const auto& tk : d.ticks) {
        if (tk.selected != 'r') continue;
        out << "<circle cx=\"" << fmt(m.px(tk.pose.x)) << "\" cy=\"" << fmt(m.py(tk.pose.y))
            << "\" r=\"4.5\" fill=\"" << speed_color(tk.cmd.v, d.v_min, d.v_max) << "\"/>\n";
    }
    out << "</g>\n";

    char caption[256];
    std::snprintf(caption, sizeof(caption),
                  "%s / %s / seed %llu / %s / nav_time %.1f s / path %.2f m",
                  d.scenario_id.c_str(), d.planner.c_str(),
                  static_cast<unsigned long long>(d.seed), d.outcome.c_str(), d.nav_time,
                  d.path_length);
    out << "<text x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kMargin * 0.7)
        << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">" << caption
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::string& path, const std::string& svg)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open svg for writing: " + path);
    f << svg;
}

}  // namespace hnav
