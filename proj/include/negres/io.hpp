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

#pragma once

#include "negres/cost.hpp"
#include "negres/effects.hpp"
#include "negres/regime.hpp"
#include "negres/simulate.hpp"
#include "negres/value_ode.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace negres {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// A CSV table held as text cells. Cells never contain commas or quotes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(std::string_view name) const;
    std::vector<double> numeric_column(std::string_view name) const;
    bool operator==(const CsvTable&) const = default;
};

std::string to_csv_text(const CsvTable& table);
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Column contracts.
/// time, value, left_limit
CsvTable cadlag_table(const CadlagPath& path);
/// time, value, left_limit for ρ, μ or σ on the path's grid.
enum class ParamField { Rho, Mu, Sigma };
CsvTable parameter_table(const ParameterSchedule& schedule, const TimeGrid& grid, ParamField field);
/// time, state, value
CsvTable surface_table(const RegimeValueSurface& surface);
/// time, gamma, expQ, X, D. A jump contributes two rows at the same time:
/// left limits first, then the post-jump values.
CsvTable path_table(const PathRealization& path, const InitialCondition& ic);
/// scenario, strategy, mean, stderr, n_paths, deviation, quadratic
CsvTable cost_table(std::string_view scenario, const std::vector<CostReport>& reports);
/// scenario, overjump, premature, positive_guarantee, negative_trigger,
/// witness_kind, time, beta_left, beta_right. One row per witness, or a
/// single row with empty witness cells.
CsvTable effects_table(std::string_view scenario, const EffectReport& report);
std::string effects_json(std::string_view scenario, const EffectReport& report);

/// Inverse of cadlag_table, on a grid rebuilt from the time column.
CadlagPath cadlag_from_table(const CsvTable& table);
/// Inverse of cost_table.
std::vector<CostReport> costs_from_table(const CsvTable& table);

/// One line of a plot. NaN entries break the line.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Series of a càdlàg path with a break at every jump.
PlotSeries plot_series(std::string label, const CadlagPath& path);
PlotSeries plot_series(std::string label, const StrategyPath& path);
PlotSeries plot_series(std::string label, const DeviationPath& path);

/// Static SVG line plot. Long series are thinned to roughly `max_points`
/// per series; points next to a break are always kept.
std::string render_svg(std::string_view title, std::string_view x_label, const std::vector<PlotSeries>& series,
                       std::size_t max_points = 1500);

} // namespace negres
