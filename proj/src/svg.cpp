#include "umbilic/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace umb {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](const Vec2& p) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    };
    for (const auto& l : plot.lines)
        for (const auto& p : l.points) grow(p);
    for (const auto& p : plot.markers) grow(p);
    if (!(x0 <= x1)) x0 = y0 = -1, x1 = y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double mx = 0.05 * (x1 - x0), my = 0.05 * (y1 - y0);
    x0 -= mx, x1 += mx, y0 -= my, y1 += my;
    const double w = x1 - x0, h = y1 - y0;
    const double font = 0.025 * std::max(w, h);

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" preserveAspectRatio=\"none\" viewBox=\"" +
           num(x0) + " " + num(-y1) + " " + num(w) + " " + num(h) + "\">\n";
    out += "<title>" + escape(plot.title) + "</title>\n";
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(-y1) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"white\"/>\n";
    for (const auto& l : plot.lines) {
        out += "<polyline fill=\"none\" stroke=\"" + escape(l.stroke) +
               "\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" points=\"";
        for (std::size_t i = 0; i < l.points.size(); ++i) {
            if (i) out += ' ';
            out += num(l.points[i].x()) + "," + num(-l.points[i].y());
        }
        out += "\"/>\n";
    }
    for (const auto& p : plot.markers)
        out += "<circle cx=\"" + num(p.x()) + "\" cy=\"" + num(-p.y()) + "\" r=\"" + num(0.6 * font) +
               "\" fill=\"#c0392b\"/>\n";
    out += "<text x=\"" + num(x1 - mx) + "\" y=\"" + num(-y0 - 0.3 * my) + "\" font-size=\"" + num(font) +
           "\" text-anchor=\"end\">" + escape(plot.x_label) + "</text>\n";
    out += "<text x=\"" + num(x0 + 0.3 * mx) + "\" y=\"" + num(-y1 + my) + "\" font-size=\"" + num(font) + "\">" +
           escape(plot.y_label) + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace umb
