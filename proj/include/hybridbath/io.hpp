// io.hpp: deterministic artifact serialization. CSV is the primary format
// (17 significant digits, LF endings, versioned header comments); SVG plots
// are rendered purely from CSV content so regeneration is byte-identical,
// and manifests carry FNV-1a checksums of every artifact.

#pragma once

#include "hybridbath/coeffs.hpp"
#include "hybridbath/errors.hpp"
#include "hybridbath/master.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hybridbath {

inline constexpr const char* kToolVersion = "hybridbath 0.1.0";

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

// round-trip-exact decimal form
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> comments;  // written as "# <text>", first one is the schema tag
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string csv_to_string(const CsvTable& table) {
    std::string out;
    for (const auto& c : table.comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        out += table.columns[j];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_number(row[j]);
        }
        out += '\n';
    }
    return out;
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
            table.comments.push_back(line.substr(start));
            continue;
        }
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw config_error("csv", "row has " + std::to_string(cells.size()) +
                                          " cells, header has " +
                                          std::to_string(table.columns.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw config_error("csv", "cannot parse numeric cell: " + cell);
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw config_error("csv", "missing header row");
    return table;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw resource_error("cannot open for writing: " + path);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw resource_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("path", "cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------- table builders ---------------------------------

inline CsvTable trajectory_table(const Trajectory& traj, const std::string& model_line) {
    CsvTable t;
    t.comments = {"hybridbath trajectory v1", model_line};
    t.columns.push_back("t");
    const Eigen::Index d = traj.states.empty() ? 0 : traj.states.front().rows();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            t.columns.push_back("re_rho_" + std::to_string(i) + "_" + std::to_string(j));
            t.columns.push_back("im_rho_" + std::to_string(i) + "_" + std::to_string(j));
        }
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        std::vector<double> row;
        row.reserve(1 + std::size_t(2 * d * d));
        row.push_back(traj.times[n]);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                row.push_back(traj.states[n](i, j).real());
                row.push_back(traj.states[n](i, j).imag());
            }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable coefficients_table(const CoefficientReport& report, const std::string& model_line) {
    CsvTable t;
    t.comments = {"hybridbath coefficients v1", model_line};
    t.columns.push_back("t");
    for (const auto& name : report.names) {
        t.columns.push_back("re_" + name);
        t.columns.push_back("im_" + name);
    }
    for (std::size_t n = 0; n < report.times.size(); ++n) {
        std::vector<double> row;
        row.reserve(1 + 2 * report.names.size());
        row.push_back(report.times[n]);
        for (std::size_t k = 0; k < report.names.size(); ++k) {
            row.push_back(report.series[k][n].real());
            row.push_back(report.series[k][n].imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable compare_table(const std::vector<double>& times,
                              const std::vector<double>& distances) {
    CsvTable t;
    t.comments = {"hybridbath oracle-compare v1"};
    t.columns = {"t", "trace_distance"};
    for (std::size_t n = 0; n < times.size(); ++n) t.rows.push_back({times[n], distances[n]});
    return t;
}

// --------------------------- SVG line charts --------------------------------
//
// Minimal renderer: first column is the abscissa; re_/im_ column pairs plot
// as magnitudes, any other column plots as is. Everything is derived from the
// parsed table, never from live state, to keep regeneration bit-stable.

namespace detail {

struct PlotSeries {
    std::string label;
    std::vector<double> values;
};

inline std::vector<PlotSeries> plot_series_of(const CsvTable& table) {
    std::vector<PlotSeries> out;
    std::size_t j = 1;
    while (j < table.columns.size()) {
        const std::string& name = table.columns[j];
        if (name.rfind("re_", 0) == 0 && j + 1 < table.columns.size() &&
            table.columns[j + 1] == "im_" + name.substr(3)) {
            PlotSeries s;
            s.label = "|" + name.substr(3) + "|";
            s.values.reserve(table.rows.size());
            for (const auto& row : table.rows)
                s.values.push_back(std::hypot(row[j], row[j + 1]));
            out.push_back(std::move(s));
            j += 2;
        } else {
            PlotSeries s;
            s.label = name;
            s.values.reserve(table.rows.size());
            for (const auto& row : table.rows) s.values.push_back(row[j]);
            out.push_back(std::move(s));
            j += 1;
        }
    }
    return out;
}

inline std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string svg_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace detail

inline std::string svg_from_csv(const CsvTable& table) {
    const double W = 720, H = 440, L = 70, R = 16, T = 34, B = 48;
    const auto series = detail::plot_series_of(table);
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                             "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};
    const std::size_t npal = sizeof(palette) / sizeof(palette[0]);

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!table.rows.empty()) {
        xmin = xmax = table.rows.front()[0];
        for (const auto& row : table.rows) {
            xmin = std::min(xmin, row[0]);
            xmax = std::max(xmax, row[0]);
        }
        bool first = true;
        for (const auto& s : series)
            for (double v : s.values) {
                if (first) { ymin = ymax = v; first = false; }
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    }
    if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-300) { ymax += 0.5; ymin -= 0.5; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
           "viewBox=\"0 0 720 440\">\n";
    svg += "<rect width=\"720\" height=\"440\" fill=\"#ffffff\"/>\n";
    const std::string title = table.comments.empty() ? "hybridbath" : table.comments.front();
    svg += "<text x=\"" + detail::svg_coord(L) + "\" y=\"20\" font-family=\"monospace\" "
           "font-size=\"14\">" + title + "</text>\n";
    // axes
    svg += "<line x1=\"" + detail::svg_coord(L) + "\" y1=\"" + detail::svg_coord(H - B) +
           "\" x2=\"" + detail::svg_coord(W - R) + "\" y2=\"" + detail::svg_coord(H - B) +
           "\" stroke=\"#000000\"/>\n";
    svg += "<line x1=\"" + detail::svg_coord(L) + "\" y1=\"" + detail::svg_coord(T) + "\" x2=\"" +
           detail::svg_coord(L) + "\" y2=\"" + detail::svg_coord(H - B) +
           "\" stroke=\"#000000\"/>\n";
    // tick labels at the extremes
    svg += "<text x=\"" + detail::svg_coord(L) + "\" y=\"" + detail::svg_coord(H - B + 18) +
           "\" font-family=\"monospace\" font-size=\"11\">" + detail::svg_tick(xmin) + "</text>\n";
    svg += "<text x=\"" + detail::svg_coord(W - R - 60) + "\" y=\"" +
           detail::svg_coord(H - B + 18) + "\" font-family=\"monospace\" font-size=\"11\">" +
           detail::svg_tick(xmax) + "</text>\n";
    svg += "<text x=\"6\" y=\"" + detail::svg_coord(H - B) +
           "\" font-family=\"monospace\" font-size=\"11\">" + detail::svg_tick(ymin + ypad) +
           "</text>\n";
    svg += "<text x=\"6\" y=\"" + detail::svg_coord(T + 10) +
           "\" font-family=\"monospace\" font-size=\"11\">" + detail::svg_tick(ymax - ypad) +
           "</text>\n";
    const std::string xlabel = table.columns.empty() ? "t" : table.columns.front();
    svg += "<text x=\"" + detail::svg_coord((L + W - R) / 2) + "\" y=\"" +
           detail::svg_coord(H - 12) + "\" font-family=\"monospace\" font-size=\"12\">" + xlabel +
           "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = palette[k % npal];
        std::string points;
        for (std::size_t n = 0; n < table.rows.size(); ++n) {
            points += detail::svg_coord(px(table.rows[n][0]));
            points += ',';
            points += detail::svg_coord(py(series[k].values[n]));
            if (n + 1 < table.rows.size()) points += ' ';
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = T + 14.0 + 16.0 * double(k);
        svg += "<line x1=\"" + detail::svg_coord(W - R - 150) + "\" y1=\"" +
               detail::svg_coord(ly - 4) + "\" x2=\"" + detail::svg_coord(W - R - 130) +
               "\" y2=\"" + detail::svg_coord(ly - 4) + "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + detail::svg_coord(W - R - 124) + "\" y=\"" + detail::svg_coord(ly) +
               "\" font-family=\"monospace\" font-size=\"11\">" + series[k].label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace hybridbath
