#pragma once

#include <map>
#include <string>
#include <vector>

#include "nmor/common.hpp"

namespace nmor {

// Tabular results and the three artifact formats (CSV, JSON, SVG).

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;    // each row has columns.size() entries
    std::map<std::string, std::string> meta;  // provenance stamped into every artifact
};

// CSV: "# key = value" provenance lines, a header row, then %.17g data, so
// doubles survive a round-trip exactly.
void write_csv(const std::string& path, const Table& table);
Table read_csv(const std::string& path);

// One JSON document holding every table plus shared provenance.
void write_json(const std::string& path, const std::vector<Table>& tables,
                const std::map<std::string, std::string>& meta);

struct Trace {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string name;  // output stem
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Trace> traces;  // drawn in order
};

// Self-contained SVG line plot: axes, ticks (decades when log_x), legend.
void write_svg(const std::string& path, const PlotSpec& plot);

}  // namespace nmor
