#pragma once

#include <string>
#include <vector>

namespace fhn {

struct PlotSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Static SVG line plot. Non-finite points (and non-positive ones on log
/// axes) break the polyline.
[[nodiscard]] std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

/// Throws IoError when the file cannot be written.
void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace fhn
