/*
 * Copyright (c) 2026 The negres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "negres/io.hpp"

#include "negres/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace negres {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_number(std::string_view cell)
{
    if (cell == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(cell) + "'");
    return v;
}

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return cells;
}

std::vector<std::string> numeric_row(std::initializer_list<double> values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values)
        row.push_back(format_number(v));
    return row;
}

} // namespace

std::size_t CsvTable::column_index(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error(ErrorCode::InvalidArgument, "no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const
{
    const auto c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows)
        out.push_back(parse_number(row.at(c)));
    return out;
}

std::string to_csv_text(const CsvTable& table)
{
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += row[i];
        }
        out += '\n';
    };
    append_row(table.header);
    for (const auto& row : table.rows)
        append_row(row);
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos = end + 1;
        if (line.empty())
            continue;
        auto cells = split_line(line);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw Error(ErrorCode::ParseError, "CSV row has " + std::to_string(cells.size()) +
                                                       " cells, header has " + std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (first)
        throw Error(ErrorCode::ParseError, "empty CSV");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, to_csv_text(table)); }

CsvTable cadlag_table(const CadlagPath& path)
{
    CsvTable t{{"time", "value", "left_limit"}, {}};
    t.rows.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k)
        t.rows.push_back(numeric_row({path.time(k), path.values[k], path.left_limits[k]}));
    return t;
}

CsvTable parameter_table(const ParameterSchedule& schedule, const TimeGrid& grid, ParamField field)
{
    auto pick = [field](const Params& p) {
        switch (field) {
        case ParamField::Rho: return p.rho;
        case ParamField::Mu: return p.mu;
        case ParamField::Sigma: return p.sigma;
        }
        return 0.0;
    };
    CsvTable t{{"time", "value", "left_limit"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double tk = grid.times[k];
        const double right = pick(schedule.eval_in(grid.segment[k], tk));
        const double left = k == 0 ? right : pick(schedule.eval_in(grid.segment[k - 1], tk));
        t.rows.push_back(numeric_row({tk, right, left}));
    }
    return t;
}

CsvTable surface_table(const RegimeValueSurface& surface)
{
    CsvTable t{{"time", "state", "value"}, {}};
    for (std::size_t k = 0; k < surface.times.size(); ++k)
        for (std::size_t i = 0; i < surface.n_states; ++i)
            t.rows.push_back({format_number(surface.times[k]), std::to_string(i), format_number(surface.at(k, i))});
    return t;
}

CsvTable path_table(const PathRealization& path, const InitialCondition& ic)
{
    (void)ic;
    CsvTable t{{"time", "gamma", "expQ", "X", "D"}, {}};
    const auto& x = path.optimal.strategy;
    const auto& d = path.optimal.deviation;
    const auto& b = path.bundle;
    for (std::size_t k = 0; k < b.grid->size(); ++k) {
        const double tk = b.grid->times[k];
        if (x.left_limits[k] != x.values[k] || d.left_limits[k] != d.values[k])
            t.rows.push_back(numeric_row({tk, b.gamma[k], b.expQ[k], x.left_limits[k], d.left_limits[k]}));
        t.rows.push_back(numeric_row({tk, b.gamma[k], b.expQ[k], x.values[k], d.values[k]}));
    }
    return t;
}

CsvTable cost_table(std::string_view scenario, const std::vector<CostReport>& reports)
{
    CsvTable t{{"scenario", "strategy", "mean", "stderr", "n_paths", "deviation", "quadratic"}, {}};
    for (const auto& r : reports)
        t.rows.push_back({std::string(scenario), r.strategy, format_number(r.mean), format_number(r.std_error),
                          std::to_string(r.n_paths), format_number(r.components.deviation),
                          format_number(r.components.quadratic)});
    return t;
}

std::vector<CostReport> costs_from_table(const CsvTable& table)
{
    const auto strategy = table.column_index("strategy");
    const auto mean = table.numeric_column("mean");
    const auto se = table.numeric_column("stderr");
    const auto n = table.numeric_column("n_paths");
    const auto dev = table.numeric_column("deviation");
    const auto quad = table.numeric_column("quadratic");
    std::vector<CostReport> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        out.push_back({table.rows[r][strategy], mean[r], se[r], static_cast<std::size_t>(n[r]), {dev[r], quad[r]}});
    return out;
}

CsvTable effects_table(std::string_view scenario, const EffectReport& report)
{
    CsvTable t{{"scenario", "overjump", "premature", "positive_guarantee", "negative_trigger", "witness_kind", "time",
                "beta_left", "beta_right"},
               {}};
    const std::vector<std::string> prefix{std::string(scenario), report.overjump ? "true" : "false",
                                          report.premature ? "true" : "false",
                                          to_string(report.positive_guarantee), to_string(report.negative_trigger)};
    if (report.witnesses.empty()) {
        auto row = prefix;
        row.insert(row.end(), 4, "");
        t.rows.push_back(std::move(row));
    }
    for (const auto& w : report.witnesses) {
        auto row = prefix;
        row.push_back(to_string(w.kind));
        row.push_back(format_number(w.time));
        row.push_back(format_number(w.beta_left));
        row.push_back(format_number(w.beta_right));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string effects_json(std::string_view scenario, const EffectReport& report)
{
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["overjump"] = report.overjump;
    j["premature"] = report.premature;
    j["positive_guarantee"] = to_string(report.positive_guarantee);
    j["negative_trigger"] = to_string(report.negative_trigger);
    auto& w = j["witnesses"] = nlohmann::ordered_json::array();
    for (const auto& x : report.witnesses)
        w.push_back({{"kind", to_string(x.kind)},
                     {"time", x.time},
                     {"beta_left", x.beta_left},
                     {"beta_right", x.beta_right}});
    return j.dump(2) + "\n";
}

CadlagPath cadlag_from_table(const CsvTable& table)
{
    auto grid = std::make_shared<TimeGrid>();
    grid->times = table.numeric_column("time");
    grid->segment.assign(grid->times.size(), 0);
    return {grid, table.numeric_column("value"), table.numeric_column("left_limit")};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PlotSeries series_from(std::string label, const std::vector<double>& times, const std::vector<double>& values,
                       const std::vector<double>& left, std::optional<double> before_start)
{
    PlotSeries s{std::move(label), {}, {}};
    s.x.reserve(times.size() + 8);
    s.y.reserve(times.size() + 8);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const bool jump = k == 0 ? before_start.has_value() && *before_start != values[0] : left[k] != values[k];
        if (jump) {
            if (k > 0) {
                s.x.push_back(times[k]);
                s.y.push_back(left[k]);
            } else {
                s.x.push_back(times[0]);
                s.y.push_back(*before_start);
            }
            s.x.push_back(kNaN);
            s.y.push_back(kNaN);
        }
        s.x.push_back(times[k]);
        s.y.push_back(values[k]);
    }
    return s;
}

} // namespace

PlotSeries plot_series(std::string label, const CadlagPath& path)
{
    return series_from(std::move(label), path.grid->times, path.values, path.left_limits, std::nullopt);
}

PlotSeries plot_series(std::string label, const StrategyPath& path)
{
    return series_from(std::move(label), path.grid->times, path.values, path.left_limits, std::nullopt);
}

PlotSeries plot_series(std::string label, const DeviationPath& path)
{
    return series_from(std::move(label), path.grid->times, path.values, path.left_limits, std::nullopt);
}

namespace {

std::string escape_xml(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

double nice_step(double span, int target)
{
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

std::string tick_label(double v, double step)
{
    if (std::abs(v) < step * 1e-9)
        v = 0.0;
    std::ostringstream os;
    const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string coord(double v)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

} // namespace

std::string render_svg(std::string_view title, std::string_view x_label, const std::vector<PlotSeries>& series,
                       std::size_t max_points)
{
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin)
        xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12 * std::max(1.0, std::abs(ymax))) {
        const double pad = std::max(0.5, std::abs(ymax) * 0.1);
        ymin -= pad;
        ymax += pad;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
        << "</text>\n";
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(xmax - xmin, 6);
    for (double v = std::ceil(xmin / xs) * xs; v <= xmax + xs * 1e-9; v += xs) {
        svg << "<line x1=\"" << coord(px(v)) << "\" y1=\"" << H - B << "\" x2=\"" << coord(px(v)) << "\" y2=\""
            << H - B + 5 << "\" stroke=\"black\"/>";
        svg << "<text x=\"" << coord(px(v)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
            << tick_label(v, xs) << "</text>\n";
    }
    const double ys = nice_step(ymax - ymin, 5);
    for (double v = std::ceil(ymin / ys) * ys; v <= ymax + ys * 1e-9; v += ys) {
        svg << "<line x1=\"" << L - 5 << "\" y1=\"" << coord(py(v)) << "\" x2=\"" << W - R << "\" y2=\""
            << coord(py(v)) << "\" stroke=\"#dddddd\"/>";
        svg << "<text x=\"" << L - 8 << "\" y=\"" << coord(py(v) + 4) << "\" text-anchor=\"end\">"
            << tick_label(v, ys) << "</text>\n";
    }
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
        << escape_xml(x_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::size_t n = s.x.size();
        const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / std::max<std::size_t>(1, max_points));
        auto is_break = [&](std::size_t i) { return !std::isfinite(s.x[i]) || !std::isfinite(s.y[i]); };
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_break(i)) {
                pen_down = false;
                continue;
            }
            const bool edge = i + 1 == n || i == 0 || is_break(i - 1) || is_break(i + 1);
            if (!edge && i % stride != 0)
                continue;
            d += pen_down ? " L" : " M";
            d += coord(px(s.x[i])) + "," + coord(py(s.y[i]));
            pen_down = true;
        }
        const char* color = palette[si % std::size(palette)];
        svg << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" d=\"" << d << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = T + 16 + 16 * static_cast<double>(si);
            svg << "<line x1=\"" << W - R - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R - 100 << "\" y2=\""
                << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
            svg << "<text x=\"" << W - R - 95 << "\" y=\"" << ly << "\">" << escape_xml(s.label) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace negres
