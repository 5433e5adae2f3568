#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "qdimer/errors.hpp"
#include "qdimer/output.hpp"

namespace qdimer {

std::string format_number(double v) {
    if (v == 0.0) return "0"; // also folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    if (ec != std::errc()) throw RangeError("format_number: buffer too small");
    return std::string(buf, ptr);
}

void write_csv(const SweepGrid& grid, std::ostream& out) {
    std::string text;
    for (const auto& [k, v] : grid.metadata) text += "# " + k + " = " + v + "\n";
    for (const auto& a : grid.axes) text += a.name + ",";
    text += grid.observable + "\n";

    const std::size_t nx = grid.coords.empty() ? 0 : grid.coords[0].size();
    const std::size_t ny = grid.coords.size() > 1 ? grid.coords[1].size() : 1;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            text += format_number(grid.coords[0][i]) + ",";
            if (grid.coords.size() > 1) text += format_number(grid.coords[1][j]) + ",";
            const auto& cell = grid.field[i * ny + j];
            text += cell ? format_number(*cell) : "NA";
            text += '\n';
        }
    }
    out.write(text.data(), std::streamsize(text.size()));
}

void write_csv(const SweepGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    write_csv(grid, out);
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos || eq < 2) throw InvalidInput("read_csv: bad metadata on line " + std::to_string(lineno));
            table.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
            continue;
        }
        if (!have_header) {
            table.header = split(line);
            have_header = true;
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != table.header.size())
            throw InvalidInput("read_csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                               " fields, header has " + std::to_string(table.header.size()));
        std::vector<std::optional<double>> row;
        for (const auto& c : cells) {
            if (c == "NA") {
                row.emplace_back();
                continue;
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size())
                throw InvalidInput("read_csv: bad number '" + c + "' on line " + std::to_string(lineno));
            row.emplace_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw InvalidInput("read_csv: no header row");
    return table;
}

} // namespace qdimer
