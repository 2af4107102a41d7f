#include "elbowsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace elbowsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
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

// round limits outward to a tidy tick step
struct Axis {
    double lo, hi, step;
};

Axis nice_axis(double lo, double hi) {
    if (!(hi > lo)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

} // namespace

std::string render_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    bool has_data = false;
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw std::invalid_argument("plot series '" + s.label + "' has mismatched x/y sizes");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            has_data = true;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!has_data) {
        throw std::invalid_argument("nothing to plot: no series with data");
    }
    const Axis xa = nice_axis(x_min, x_max);
    const Axis ya = nice_axis(y_min, y_max);

    const double ml = 70, mr = 160, mt = 40, mb = 55; // margins, legend on the right
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    auto px = [&](double x) { return ml + (x - xa.lo) / (xa.hi - xa.lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ya.lo) / (ya.hi - ya.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(spec.width) +
           "\" height=\"" + num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) + " " +
           num(spec.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + escape_xml(spec.title) + "</text>\n";

    // gridlines and ticks
    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double x = xa.lo; x <= xa.hi + xa.step / 2; x += xa.step) {
        const double X = px(x);
        svg += "<line x1=\"" + num(X) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(X) +
               "\" y2=\"" + num(mt + ph) + "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + num(X) + "\" y=\"" + num(mt + ph + 18) +
               "\" text-anchor=\"middle\">" + num(x) + "</text>\n";
    }
    for (double y = ya.lo; y <= ya.hi + ya.step / 2; y += ya.step) {
        const double Y = py(y);
        svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(Y) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(Y) + "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(Y + 4) +
               "\" text-anchor=\"end\">" + num(y) + "</text>\n";
    }
    svg += "</g>\n";

    // axes
    svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(spec.height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape_xml(spec.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + num(mt + ph / 2) + ")\">" +
           escape_xml(spec.y_label) + "</text>\n";

    // series
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.x.empty()) {
            continue;
        }
        const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    }

    // legend
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    double ly = mt + 10;
    for (std::size_t si = 0; si < series.size(); ++si) {
        if (series[si].x.empty()) {
            continue;
        }
        const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
        svg += "<line x1=\"" + num(ml + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(ml + pw + 34) + "\" y2=\"" + num(ly) + "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(ml + pw + 40) + "\" y=\"" + num(ly + 4) + "\">" +
               escape_xml(series[si].label) + "</text>\n";
        ly += 18;
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void write_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                      const std::string& path) {
    const std::string svg = render_line_chart(spec, series);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << svg;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

} // namespace elbowsim
