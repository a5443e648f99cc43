#pragma once

#include <string>
#include <vector>

namespace qwalk {

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;  // empty -> palette color by series index
    bool dashed = false;
    bool markers = false;
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 440;
    std::vector<SvgSeries> series;
};

// Minimal line-chart renderer; the output is a pure function of the chart
// description.  Non-finite points, and non-positive ones on log axes, are
// dropped.
std::string render_line_chart(const SvgChart& chart);
void write_line_chart(const std::string& path, const SvgChart& chart);

}  // namespace qwalk
