#include "nmor/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nmor {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open for writing");
    return out;
}

void check_shape(const Table& table) {
    if (table.columns.empty()) throw domain_error("table '" + table.name + "' has no columns");
    for (const auto& row : table.rows)
        if (row.size() != table.columns.size())
            throw domain_error("table '" + table.name + "' has a ragged row");
}

}  // namespace

void write_csv(const std::string& path, const Table& table) {
    check_shape(table);
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : table.meta) out << "# " << key << " = " << value << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << fmt17(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    if (!out) throw io_error(path + ": write failed");
}

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open for reading");
    Table table;
    table.name = path;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::size_t eq = line.find('=');
            if (eq != std::string::npos) {
                auto strip = [](std::string s) {
                    const auto a = s.find_first_not_of(" \t#");
                    const auto b = s.find_last_not_of(" \t");
                    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
                };
                table.meta[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
            }
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw io_error(path + ": row with " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(table.columns.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            row[c] = std::strtod(cells[c].c_str(), &end);
            if (end != cells[c].c_str() + cells[c].size())
                throw io_error(path + ": bad number '" + cells[c] + "'");
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw io_error(path + ": no header row");
    return table;
}

void write_json(const std::string& path, const std::vector<Table>& tables,
                const std::map<std::string, std::string>& meta) {
    nlohmann::json doc;
    doc["meta"] = meta;
    for (const Table& t : tables) {
        check_shape(t);
        nlohmann::json jt;
        jt["columns"] = t.columns;
        jt["rows"] = t.rows;
        if (!t.meta.empty()) jt["meta"] = t.meta;
        doc["tables"][t.name] = std::move(jt);
    }
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw io_error(path + ": write failed");
}

namespace {

constexpr double kW = 760, kH = 480;
constexpr double kLeft = 72, kRight = 18, kTop = 42, kBottom = 56;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};

// Largest 1/2/5 x 10^k not above `raw`.
double nice_step(double raw) {
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r >= 5.0) return 5.0 * mag;
    if (r >= 2.0) return 2.0 * mag;
    return mag;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

void write_svg(const std::string& path, const PlotSpec& plot) {
    if (plot.traces.empty()) throw domain_error("write_svg: no traces");

    // Data ranges; log-x drops non-positive abscissae.
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Trace& tr : plot.traces) {
        if (tr.x.size() != tr.y.size()) throw domain_error("write_svg: trace with x/y length mismatch");
        for (std::size_t i = 0; i < tr.x.size(); ++i) {
            if (!std::isfinite(tr.x[i]) || !std::isfinite(tr.y[i])) continue;
            if (plot.log_x && tr.x[i] <= 0.0) continue;
            const double xv = plot.log_x ? std::log10(tr.x[i]) : tr.x[i];
            x_lo = std::min(x_lo, xv), x_hi = std::max(x_hi, xv);
            y_lo = std::min(y_lo, tr.y[i]), y_hi = std::max(y_hi, tr.y[i]);
        }
    }
    if (!(x_lo <= x_hi)) throw domain_error("write_svg: no drawable points");
    if (x_lo == x_hi) x_lo -= 1.0, x_hi += 1.0;
    if (y_lo == y_hi) y_lo -= 1.0, y_hi += 1.0;
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad, y_hi += y_pad;

    const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
    auto px = [&](double xv) { return kLeft + (xv - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double yv) { return kTop + (y_hi - yv) / (y_hi - y_lo) * plot_h; };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
        << "<clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\"/></clipPath>\n";

    // Ticks + grid.
    auto tick = [&](double xv, bool vertical, const std::string& label) {
        if (vertical) {
            const double x = px(xv);
            out << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
                << kTop + plot_h << "\" stroke=\"#dddddd\"/>\n"
                << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 16
                << "\" text-anchor=\"middle\">" << label << "</text>\n";
        } else {
            const double y = py(xv);
            out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w
                << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n"
                << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4
                << "\" text-anchor=\"end\">" << label << "</text>\n";
        }
    };
    if (plot.log_x) {
        for (double d = std::ceil(x_lo); d <= std::floor(x_hi) + 1e-9; d += 1.0)
            tick(d, true, "1e" + std::to_string(int(std::lround(d))));
    } else {
        const double step = nice_step((x_hi - x_lo) / 6.0);
        for (double v = std::ceil(x_lo / step) * step; v <= x_hi + step * 1e-9; v += step)
            tick(v, true, fmt6(v + 0.0));
    }
    const double y_step = nice_step((y_hi - y_lo) / 6.0);
    for (double v = std::ceil(y_lo / y_step) * y_step; v <= y_hi + y_step * 1e-9; v += y_step)
        tick(v, false, fmt6(v + 0.0));

    // Frame.
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Traces (gaps at non-drawable points).
    for (std::size_t t = 0; t < plot.traces.size(); ++t) {
        const Trace& tr = plot.traces[t];
        const char* color = kPalette[t % (sizeof kPalette / sizeof *kPalette)];
        out << "<path clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.4\" d=\"";
        bool pen_down = false;
        for (std::size_t i = 0; i < tr.x.size(); ++i) {
            const bool ok = std::isfinite(tr.x[i]) && std::isfinite(tr.y[i]) &&
                            (!plot.log_x || tr.x[i] > 0.0);
            if (!ok) {
                pen_down = false;
                continue;
            }
            const double xv = plot.log_x ? std::log10(tr.x[i]) : tr.x[i];
            out << (pen_down ? "L" : "M") << fmt6(px(xv)) << " " << fmt6(py(tr.y[i])) << " ";
            pen_down = true;
        }
        out << "\"/>\n";
    }

    // Legend, top-right inside the frame.
    const double lx = kLeft + plot_w - 150, ly0 = kTop + 10;
    for (std::size_t t = 0; t < plot.traces.size(); ++t) {
        const double ly = ly0 + 18.0 * double(t);
        out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\"" << ly
            << "\" stroke=\"" << kPalette[t % (sizeof kPalette / sizeof *kPalette)]
            << "\" stroke-width=\"1.4\"/>\n"
            << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4 << "\">" << esc(plot.traces[t].label)
            << "</text>\n";
    }

    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kTop - 14
        << "\" text-anchor=\"middle\" font-size=\"14\">" << esc(plot.title) << "</text>\n"
        << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 14
        << "\" text-anchor=\"middle\">" << esc(plot.x_label) << "</text>\n"
        << "<text transform=\"translate(16," << kTop + plot_h / 2 << ") rotate(-90)\""
        << " text-anchor=\"middle\">" << esc(plot.y_label) << "</text>\n</svg>\n";
    if (!out) throw io_error(path + ": write failed");
}

}  // namespace nmor
