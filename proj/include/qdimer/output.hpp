// output.hpp: CSV and SVG emission for sweep grids
//
// CSV dialect: '#'-prefixed metadata lines, one header row (axis names then the
// observable), row-major data rows with x as the slow axis. Numbers carry 12
// significant digits in the C locale, separator ',', newline LF, NA for cells
// where the observable is undefined.

#pragma once

#include <iosfwd>
#include <string>

#include "qdimer/sweep.hpp"

namespace qdimer {

// Shortest general-format rendering with at most 12 significant digits; locale independent.
std::string format_number(double v);

void write_csv(const SweepGrid& grid, std::ostream& out);
void write_csv(const SweepGrid& grid, const std::string& path); // IoError on failure

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;
};

// Parses the dialect written by write_csv. Throws InvalidInput on malformed rows.
CsvTable read_csv(std::istream& in);

enum class SvgStyle { Auto, Heatmap, Lines };

// Heatmap for two axes, polyline for one. Throws InvalidInput for other ranks or a
// heatmap request on a one-axis grid.
void render_svg(const SweepGrid& grid, std::ostream& out, SvgStyle style = SvgStyle::Auto);
void render_svg(const SweepGrid& grid, const std::string& path, SvgStyle style = SvgStyle::Auto);

// Diverging map used by the heatmap: s in [-1, 1] -> blue .. white .. red.
struct Rgb {
    int r, g, b;
};
Rgb diverging_color(double s);

} // namespace qdimer
