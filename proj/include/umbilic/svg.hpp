#pragma once

#include <string>
#include <vector>

#include "umbilic/surface.hpp"

namespace umb {

struct Polyline {
    std::vector<Vec2> points;
    std::string stroke = "#1f4e9c";
};

struct SvgPlot {
    std::string title;
    std::string x_label = "u";
    std::string y_label = "v";
    std::vector<Polyline> lines;
    std::vector<Vec2> markers;
};

/// 800x800 canvas, viewBox in data units spanning the data bounds plus 5%,
/// y axis pointing up. One <polyline> per line.
std::string render_svg(const SvgPlot& plot);

}  // namespace umb
