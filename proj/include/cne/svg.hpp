#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/model.hpp"

namespace cne {

struct PlotOptions {
    double width = 800.0;
    double height = 800.0;
    double margin = 40.0;
    double base_radius = 4.0;
};

// 2-D scatter of an embedding as SVG 1.1. Colors keyed by block when blocks
// are given; marker radius scales with log(degree + 1) when degrees are given.
inline std::string render_scatter_svg(const Embedding& emb, const std::vector<int>& blocks,
                                      const std::vector<int>& degrees,
                                      const PlotOptions& opt = {}) {
    if (emb.d != 2)
        throw std::invalid_argument("plotting requires a 2-dimensional embedding; retrain with "
                                    "dim = 2");
    if (!blocks.empty() && static_cast<int>(blocks.size()) != emb.n)
        throw std::invalid_argument("block vector does not match embedding");
    if (!degrees.empty() && static_cast<int>(degrees.size()) != emb.n)
        throw std::invalid_argument("degree vector does not match embedding");

    static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr int palette_size = 10;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (emb.n > 0) {
        xmin = xmax = emb.row(0)[0];
        ymin = ymax = emb.row(0)[1];
        for (int i = 1; i < emb.n; ++i) {
            xmin = std::min(xmin, emb.row(i)[0]);
            xmax = std::max(xmax, emb.row(i)[0]);
            ymin = std::min(ymin, emb.row(i)[1]);
            ymax = std::max(ymax, emb.row(i)[1]);
        }
    }
    double xspan = xmax - xmin, yspan = ymax - ymin;
    if (xspan <= 0) xspan = 1;
    if (yspan <= 0) yspan = 1;
    double sx = (opt.width - 2 * opt.margin) / xspan;
    double sy = (opt.height - 2 * opt.margin) / yspan;

    double max_log_deg = 1.0;
    for (int d : degrees) max_log_deg = std::max(max_log_deg, std::log(double(d) + 1.0));

    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width
        << "\" height=\"" << opt.height << "\">\n";
    for (int i = 0; i < emb.n; ++i) {
        double cx = opt.margin + (emb.row(i)[0] - xmin) * sx;
        // SVG y axis points down
        double cy = opt.height - opt.margin - (emb.row(i)[1] - ymin) * sy;
        double r = opt.base_radius;
        if (!degrees.empty())
            r = opt.base_radius * (0.5 + std::log(double(degrees[i]) + 1.0) / max_log_deg);
        const char* fill = blocks.empty() ? palette[0] : palette[blocks[i] % palette_size];
        out << "  <circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\""
            << fill << "\" fill-opacity=\"0.75\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace cne
