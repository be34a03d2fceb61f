#pragma once

#include <string>
#include <vector>

namespace abcage {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

/// values[iy][ix] on the (x, y) grid.
void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<std::vector<double>>& values);

} // namespace abcage
