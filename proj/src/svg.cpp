#include "gtsne/io.hpp"

#include <algorithm>
#include <cstdio>

namespace gtsne {

std::string render_svg(const Matrix& y, const std::optional<std::vector<int>>& labels, const PlotSpec& spec) {
    if (y.rows() < 1 || y.cols() < 1) {
        throw std::invalid_argument("cannot plot an empty embedding");
    }
    if (spec.width <= 0 || spec.height <= 0 || spec.palette.empty()) {
        throw std::invalid_argument("plot needs positive dimensions and a nonempty palette");
    }
    if (labels && labels->size() != y.rows()) {
        throw std::invalid_argument("label count does not match point count");
    }

    const double width = spec.width, height = spec.height;
    const double left = spec.margin * width, top = spec.margin * height;
    const double inner_w = width - 2 * left, inner_h = height - 2 * top;

    auto coord = [&](std::size_t i, std::size_t c) { return c < y.cols() ? y(i, c) : 0.0; };
    double lo[2], hi[2];
    for (std::size_t c = 0; c < 2; ++c) {
        lo[c] = hi[c] = coord(0, c);
        for (std::size_t i = 1; i < y.rows(); ++i) {
            lo[c] = std::min(lo[c], coord(i, c));
            hi[c] = std::max(hi[c], coord(i, c));
        }
    }
    const double range_x = hi[0] - lo[0], range_y = hi[1] - lo[1];
    double scale = 0;
    if (range_x > 0 && range_y > 0) {
        scale = std::min(inner_w / range_x, inner_h / range_y);
    } else if (range_x > 0) {
        scale = inner_w / range_x;
    } else if (range_y > 0) {
        scale = inner_h / range_y;
    }
    const double mid_x = (lo[0] + hi[0]) / 2, mid_y = (lo[1] + hi[1]) / 2;
    const double cx = left + inner_w / 2, cy = top + inner_h / 2;

    std::string out;
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer),
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n"
                  "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\" stroke=\"black\"/>\n",
                  spec.width, spec.height, spec.width, spec.height, spec.width, spec.height);
    out += buffer;

    const auto colors = static_cast<long>(spec.palette.size());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double px = cx + (coord(i, 0) - mid_x) * scale;
        // SVG y grows downward.
        const double py = cy - (coord(i, 1) - mid_y) * scale;
        const auto& color = labels ? spec.palette[static_cast<std::size_t>((((*labels)[i] % colors) + colors) % colors)]
                                   : spec.palette.front();
        std::snprintf(buffer, sizeof(buffer), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"%s\"/>\n", px, py,
                      spec.point_radius, color.c_str());
        out += buffer;
    }
    out += "</svg>\n";
    return out;
}

void render_svg(const Matrix& y, const std::optional<std::vector<int>>& labels, const PlotSpec& spec, const std::string& path) {
    write_text(path, render_svg(y, labels, spec));
}

} // namespace gtsne
