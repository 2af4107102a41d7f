#pragma once

#include <string>
#include <vector>

namespace elbowsim {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 860;
    int height = 560;
};

/// Renders a self-contained SVG line chart with axes, ticks and a legend.
/// Throws std::invalid_argument when no series has data.
std::string render_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                      const std::string& path);

} // namespace elbowsim
