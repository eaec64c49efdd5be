#pragma once

#include <string>

#include "hnav/logio.hpp"

namespace hnav {

// Deterministic trajectory plot built purely from log data: map, obstacle
// traces, velocity-colored robot path, bordered markers on reactive ticks.
std::string render_svg(const ReplayData& d);
void write_svg(const std::string& path, const std::string& svg);

}  // namespace hnav
