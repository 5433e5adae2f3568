#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "qdimer/errors.hpp"
#include "qdimer/output.hpp"

namespace qdimer {

namespace {

constexpr double width = 720, height = 520;
constexpr double left = 90, right = 130, top = 40, bottom = 70;
constexpr double plot_w = width - left - right, plot_h = height - top - bottom;

std::string px(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    (void)ec;
    return std::string(buf, ptr);
}

std::string label(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    (void)ec;
    return std::string(buf, ptr);
}

std::string rgb(Rgb c) {
    return "rgb(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b) + ")";
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", const char* extra = "") {
    return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) +
           "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2) {
    return "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" + px(y2) +
           "\" stroke=\"black\"/>\n";
}

// Position along an axis in [0, 1]: log axes are placed in log space.
double axis_fraction(const Axis& a, double v) {
    if (a.spacing == Spacing::Log) return (std::log(v) - std::log(a.lo)) / (std::log(a.hi) - std::log(a.lo));
    return (v - a.lo) / (a.hi - a.lo);
}

std::string axis_ticks(const Axis& a, bool horizontal) {
    std::string out;
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double v = a.spacing == Spacing::Log ? std::exp(std::log(a.lo) + f * (std::log(a.hi) - std::log(a.lo)))
                                                   : a.lo + f * (a.hi - a.lo);
        if (horizontal) {
            const double x = left + f * plot_w;
            out += line(x, top + plot_h, x, top + plot_h + 6);
            out += text(x, top + plot_h + 22, label(v));
        } else {
            const double y = top + plot_h - f * plot_h;
            out += line(left - 6, y, left, y);
            out += text(left - 10, y + 4, label(v), "end");
        }
    }
    return out;
}

std::pair<double, double> field_range(const SweepGrid& grid) {
    if (grid.observable == "delta_P") return {-1.0, 1.0};
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : grid.field)
        if (c) {
            lo = std::min(lo, *c);
            hi = std::max(hi, *c);
        }
    if (!(lo <= hi)) return {0.0, 1.0};
    return {lo, hi};
}

// Maps v in [lo, hi] onto [-1, 1]; a constant field sits at the centre.
double scaled(double v, double lo, double hi) {
    if (hi == lo) return 0.0;
    return std::clamp(2.0 * (v - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

std::string heatmap(const SweepGrid& grid) {
    const auto& xs = grid.coords[0];
    const auto& ys = grid.coords[1];
    const auto [lo, hi] = field_range(grid);
    const double cw = plot_w / double(xs.size()), ch = plot_h / double(ys.size());

    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const auto& cell = grid.field[i * ys.size() + j];
            const std::string fill = cell ? rgb(diverging_color(scaled(*cell, lo, hi))) : "rgb(160,160,160)";
            // Slight overlap hides anti-aliasing seams between cells.
            out += "<rect x=\"" + px(left + double(i) * cw) + "\" y=\"" + px(top + plot_h - double(j + 1) * ch) +
                   "\" width=\"" + px(cw + 0.5) + "\" height=\"" + px(ch + 0.5) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    out += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // Colour bar.
    const double bx = left + plot_w + 30, bw = 20;
    constexpr int steps = 64;
    for (int k = 0; k < steps; ++k) {
        const double s = -1.0 + 2.0 * (k + 0.5) / steps;
        const double y = top + plot_h - double(k + 1) * plot_h / steps;
        out += "<rect x=\"" + px(bx) + "\" y=\"" + px(y) + "\" width=\"" + px(bw) + "\" height=\"" +
               px(plot_h / steps + 0.5) + "\" fill=\"" + rgb(diverging_color(s)) + "\"/>\n";
    }
    out += "<rect x=\"" + px(bx) + "\" y=\"" + px(top) + "\" width=\"" + px(bw) + "\" height=\"" + px(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += text(bx + bw + 6, top + plot_h + 4, label(lo), "start");
    out += text(bx + bw + 6, top + plot_h / 2 + 4, label(0.5 * (lo + hi)), "start");
    out += text(bx + bw + 6, top + 4, label(hi), "start");
    out += text(bx + bw / 2, top - 12, grid.observable);

    out += axis_ticks(grid.axes[0], true);
    out += axis_ticks(grid.axes[1], false);
    out += text(left + plot_w / 2, height - 20, grid.axes[0].name);
    out += text(24, top + plot_h / 2, grid.axes[1].name, "middle",
                (" transform=\"rotate(-90 24 " + px(top + plot_h / 2) + ")\"").c_str());
    return out;
}

std::string lines(const SweepGrid& grid) {
    const auto& xs = grid.coords[0];
    auto [lo, hi] = field_range(grid);
    if (hi == lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    std::string out;
    out += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
           "\" fill=\"white\" stroke=\"black\"/>\n";
    std::string pts;
    auto flush = [&] {
        if (!pts.empty())
            out += "<polyline fill=\"none\" stroke=\"rgb(200,0,0)\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        pts.clear();
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& cell = grid.field[i];
        if (!cell) {
            flush(); // NA breaks the line
            continue;
        }
        const double x = left + axis_fraction(grid.axes[0], xs[i]) * plot_w;
        const double y = top + plot_h - (*cell - lo) / (hi - lo) * plot_h;
        if (!pts.empty()) pts += ' ';
        pts += px(x) + "," + px(y);
    }
    flush();

    out += axis_ticks(grid.axes[0], true);
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double y = top + plot_h - f * plot_h;
        out += line(left - 6, y, left, y);
        out += text(left - 10, y + 4, label(lo + f * (hi - lo)), "end");
    }
    out += text(left + plot_w / 2, height - 20, grid.axes[0].name);
    out += text(24, top + plot_h / 2, grid.observable, "middle",
                (" transform=\"rotate(-90 24 " + px(top + plot_h / 2) + ")\"").c_str());
    return out;
}

} // namespace

Rgb diverging_color(double s) {
    s = std::clamp(s, -1.0, 1.0);
    const auto ch = [](double f) { return int(std::lround(255.0 * f)); };
    if (s < 0.0) return {ch(1.0 + s), ch(1.0 + s), 255};
    return {255, ch(1.0 - s), ch(1.0 - s)};
}

void render_svg(const SweepGrid& grid, std::ostream& out, SvgStyle style) {
    const std::size_t rank = grid.axes.size();
    if (rank != 1 && rank != 2) throw InvalidInput("render_svg: grid must have 1 or 2 axes");
    if (style == SvgStyle::Auto) style = rank == 2 ? SvgStyle::Heatmap : SvgStyle::Lines;
    if (style == SvgStyle::Heatmap && rank != 2) throw InvalidInput("render_svg: heatmap needs two axes");
    if (style == SvgStyle::Lines && rank != 1) throw InvalidInput("render_svg: line plot needs one axis");

    std::string doc = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
                      "\" viewBox=\"0 0 " + px(width) + " " + px(height) +
                      "\" font-family=\"sans-serif\" font-size=\"12\">\n"
                      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    doc += style == SvgStyle::Heatmap ? heatmap(grid) : lines(grid);
    doc += "</svg>\n";
    out.write(doc.data(), std::streamsize(doc.size()));
}

void render_svg(const SweepGrid& grid, const std::string& path, SvgStyle style) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    render_svg(grid, out, style);
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

} // namespace qdimer
