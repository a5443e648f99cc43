#include "qwalk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qwalk/csvio.hpp"
#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;  // in plot coordinates (log10 if log axis)
    bool log = false;

    double transform(double v) const { return log ? std::log10(v) : v; }
    bool accepts(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    if (!(hi > lo)) {
        ticks.push_back(lo);
        return ticks;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 0.5 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

// Tick positions in plot coordinates plus their data-value labels.
std::vector<std::pair<double, std::string>> axis_ticks(const Axis& axis) {
    std::vector<std::pair<double, std::string>> out;
    if (axis.log) {
        const int d0 = static_cast<int>(std::ceil(axis.lo - 1e-9));
        const int d1 = static_cast<int>(std::floor(axis.hi + 1e-9));
        if (d1 - d0 >= 1) {
            for (int d = d0; d <= d1; ++d) {
                out.emplace_back(static_cast<double>(d), tick_label(std::pow(10.0, d)));
            }
            return out;
        }
        for (double t : nice_ticks(axis.lo, axis.hi, 4)) {
            out.emplace_back(t, tick_label(std::pow(10.0, t)));
        }
        return out;
    }
    for (double t : nice_ticks(axis.lo, axis.hi, 5)) {
        out.emplace_back(t, tick_label(t));
    }
    return out;
}

}  // namespace

std::string render_line_chart(const SvgChart& chart) {
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = chart.width - ml - mr;
    const double ph = chart.height - mt - mb;

    Axis ax{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            chart.log_x};
    Axis ay{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            chart.log_y};
    for (const SvgSeries& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!ax.accepts(s.x[i]) || !ay.accepts(s.y[i])) continue;
            ax.lo = std::min(ax.lo, ax.transform(s.x[i]));
            ax.hi = std::max(ax.hi, ax.transform(s.x[i]));
            ay.lo = std::min(ay.lo, ay.transform(s.y[i]));
            ay.hi = std::max(ay.hi, ay.transform(s.y[i]));
        }
    }
    if (!std::isfinite(ax.lo) || !std::isfinite(ay.lo)) {
        ax.lo = ay.lo = 0.0;
        ax.hi = ay.hi = 1.0;
    }
    auto pad = [](Axis& axis) {
        const double span = axis.hi - axis.lo;
        const double margin = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(axis.lo)) * 0.05;
        axis.lo -= margin;
        axis.hi += margin;
    };
    pad(ax);
    pad(ay);

    auto sx = [&](double v) { return ml + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto sy = [&](double v) {
        return mt + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) +
           "\" height=\"" + std::to_string(chart.height) + "\" viewBox=\"0 0 " +
           std::to_string(chart.width) + " " + std::to_string(chart.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + px(chart.width / 2.0) + "\" y=\"22\" font-size=\"15\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">" + chart.title + "</text>\n";

    // axes box
    svg += "<rect x=\"" + px(ml) + "\" y=\"" + px(mt) + "\" width=\"" + px(pw) +
           "\" height=\"" + px(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (const auto& [t, label] : axis_ticks(ax)) {
        if (t < ax.lo || t > ax.hi) continue;
        const double x = ml + (t - ax.lo) / (ax.hi - ax.lo) * pw;
        svg += "<line x1=\"" + px(x) + "\" y1=\"" + px(mt + ph) + "\" x2=\"" + px(x) +
               "\" y2=\"" + px(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + px(x) + "\" y=\"" + px(mt + ph + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" + label +
               "</text>\n";
    }
    for (const auto& [t, label] : axis_ticks(ay)) {
        if (t < ay.lo || t > ay.hi) continue;
        const double y = mt + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
        svg += "<line x1=\"" + px(ml - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(ml) +
               "\" y2=\"" + px(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + px(ml - 8) + "\" y=\"" + px(y + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" + label +
               "</text>\n";
    }
    svg += "<text x=\"" + px(ml + pw / 2) + "\" y=\"" + px(chart.height - 12.0) +
           "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
           chart.x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + px(mt + ph / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " + px(mt + ph / 2) + ")\">" + chart.y_label +
           "</text>\n";

    for (std::size_t si = 0; si < chart.series.size(); ++si) {
        const SvgSeries& s = chart.series[si];
        const std::string color =
            s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        std::string path;
        bool pen_down = false;
        std::string dots;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!ax.accepts(s.x[i]) || !ay.accepts(s.y[i])) {
                pen_down = false;
                continue;
            }
            const std::string x = px(sx(s.x[i]));
            const std::string y = px(sy(s.y[i]));
            path += (pen_down ? "L" : "M") + x + " " + y + " ";
            pen_down = true;
            if (s.markers) {
                dots += "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"2.5\" fill=\"" + color +
                        "\"/>\n";
            }
        }
        if (!path.empty()) {
            svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"" +
                   (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        }
        svg += dots;
        if (!s.name.empty()) {
            const double ly = mt + 16.0 + 16.0 * static_cast<double>(si);
            svg += "<line x1=\"" + px(ml + pw - 120) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
                   px(ml + pw - 96) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"6,4\"" : "") +
                   "/>\n";
            svg += "<text x=\"" + px(ml + pw - 90) + "\" y=\"" + px(ly) +
                   "\" font-size=\"11\" font-family=\"sans-serif\">" + s.name + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_line_chart(const std::string& path, const SvgChart& chart) {
    write_text_file(path, render_line_chart(chart));
}

}  // namespace qwalk
