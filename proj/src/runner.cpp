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

#include "negres/runner.hpp"

#include "negres/cost.hpp"
#include "negres/effects.hpp"
#include "negres/error.hpp"
#include "negres/io.hpp"
#include "negres/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace negres {

Command parse_command(std::string_view name)
{
    if (name == "validate")
        return Command::Validate;
    if (name == "solve")
        return Command::Solve;
    if (name == "simulate")
        return Command::Simulate;
    if (name == "cost")
        return Command::Cost;
    if (name == "effects")
        return Command::Effects;
    if (name == "reproduce-figures")
        return Command::ReproduceFigures;
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + std::string(name) + "'");
}

const char* to_string(Command command) noexcept
{
    switch (command) {
    case Command::Validate: return "validate";
    case Command::Solve: return "solve";
    case Command::Simulate: return "simulate";
    case Command::Cost: return "cost";
    case Command::Effects: return "effects";
    case Command::ReproduceFigures: return "reproduce-figures";
    }
    return "?";
}

fs::path output_directory(const ScenarioFile* scenario, const RunOptions& options)
{
    if (options.out)
        return *options.out;
    if (const char* env = std::getenv(kOutDirEnv); env && *env)
        return scenario ? fs::path(env) / scenario->id : fs::path(env) / "figures";
    if (scenario && !scenario->outputs.directory.empty())
        return scenario->outputs.directory;
    return scenario ? fs::path("negres_out") / scenario->id : fs::path("negres_out") / "figures";
}

namespace {

struct Context {
    ScenarioFile file;
    ResolvedScenario resolved;

    const Model& model() const { return resolved.model; }
    double grid() const { return file.run.grid; }
};

Context prepare(ScenarioFile file, const RunOptions& options)
{
    if (options.grid)
        file.run.grid = *options.grid;
    if (options.paths)
        file.run.paths = *options.paths;
    if (options.seed)
        file.run.seed = *options.seed;
    if (file.run.paths == 0)
        throw Error(ErrorCode::InvalidArgument, "paths must be at least 1");
    Context ctx{file, resolve(file)};
    return ctx;
}

class Writer {
public:
    Writer(fs::path dir, std::vector<std::string> formats) : dir_(std::move(dir)), formats_(std::move(formats))
    {
        fs::create_directories(dir_);
    }

    bool wants(std::string_view format) const
    {
        return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
    }

    void text(const std::string& name, std::string_view content)
    {
        write_text(dir_ / name, content);
        files_.push_back(name);
    }
    void csv(const std::string& name, const CsvTable& table) { text(name, to_csv_text(table)); }
    void svg(const std::string& name, std::string_view title, const std::vector<PlotSeries>& series)
    {
        if (wants("svg"))
            text(name, render_svg(title, "t", series));
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> formats_;
    std::vector<std::string> files_;
};

std::string fnv1a64(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hex32(std::uint32_t v)
{
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

void write_provenance(Writer& w, Command command, const std::vector<const Context*>& contexts, double grid,
                      std::uint64_t paths, std::uint64_t seed)
{
    json j;
    j["tool"] = "negres";
    j["version"] = kVersion;
    j["command"] = to_string(command);
    auto& sc = j["scenarios"] = json::array();
    for (const auto* c : contexts) {
        json s;
        s["id"] = c->file.id;
        if (c->resolved.kappa) {
            s["kappa"] = *c->resolved.kappa;
            s["kappa_calibrated"] = c->resolved.kappa_calibrated;
        }
        s["deterministic"] = c->model().deterministic();
        s["definition"] = emit_scenario(c->file);
        sc.push_back(std::move(s));
    }
    j["seed"] = seed;
    j["rng"] = {{"generator", "Philox4x32-10"},
                {"key", "seed split into (low 32 bits, high 32 bits)"},
                {"counter", "(block index, purpose tag, path index low 32 bits, path index high 32 bits)"},
                {"purpose_tags",
                 {{"brownian", hex32(static_cast<std::uint32_t>(StreamPurpose::Brownian))},
                  {"regime", hex32(static_cast<std::uint32_t>(StreamPurpose::Regime))}}},
                {"path_indices", "0 .. paths-1; worker count does not affect results"}};
    j["grid_steps_per_unit"] = grid;
    j["paths"] = paths;
    j["solver"] = {{"integrator", "classical RK4, fixed step per segment, backward from Y_T = 1/2"},
                   {"value_bound_tolerance", kValueBoundTol},
                   {"effect_tolerance", kEffectTol},
                   {"partition_tolerance", 1e-12},
                   {"generator_row_sum_tolerance", 1e-12},
                   {"override_samples_per_segment", kOverrideSamples}};
    auto& files = j["files"] = json::array();
    for (const auto& f : w.files())
        files.push_back({{"name", f},
                         {"bytes", static_cast<std::uint64_t>(fs::file_size(w.dir() / f))},
                         {"fnv1a64", fnv1a64(w.dir() / f)}});
    w.text(std::string("provenance_") + to_string(command) + ".json", j.dump(2) + "\n");
}

CadlagPath as_cadlag(const StrategyPath& x) { return {x.grid, x.values, x.left_limits}; }
CadlagPath as_cadlag(const DeviationPath& d) { return {d.grid, d.values, d.left_limits}; }

CadlagPath rho_path(const ParameterSchedule& schedule, std::shared_ptr<const TimeGrid> grid)
{
    const auto t = parameter_table(schedule, *grid, ParamField::Rho);
    return {grid, t.numeric_column("value"), t.numeric_column("left_limit")};
}

std::string path_name(const char* stem, std::size_t i)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "paths/%s_%04zu.csv", stem, i);
    return buf;
}

struct SolvedSchedule {
    std::shared_ptr<const TimeGrid> grid;
    ValuePath y;
    BetaPath beta;
};

SolvedSchedule solve_schedule(const ParameterSchedule& schedule, double density)
{
    auto grid = std::make_shared<const TimeGrid>(make_grid(schedule, density));
    auto y = solve_Y_backward(schedule, grid);
    auto beta = beta_from_Y(schedule, y);
    return {grid, std::move(y), std::move(beta)};
}

EffectReport schedule_effects(const ParameterSchedule& schedule, const BetaPath& beta)
{
    auto report = classify_effects(beta);
    report.positive_guarantee = check_positive_resilience_guarantee(schedule);
    report.negative_trigger = check_negative_resilience_trigger(schedule);
    return report;
}

std::string flags(const EffectReport& r)
{
    return std::string("overjump=") + (r.overjump ? "true" : "false") + " premature=" + (r.premature ? "true" : "false");
}

int cmd_validate(const Context& ctx, std::ostream& out)
{
    const auto& m = ctx.model();
    out << "scenario " << ctx.file.id << "\n";
    out << std::setprecision(10);
    out << "  horizon: " << m.horizon << "\n";
    out << "  initial condition: x=" << m.ic.x << " d=" << m.ic.d << " gamma0=" << m.ic.gamma0 << "\n";
    if (m.schedule) {
        const auto rep = validate_assumptions(*m.schedule);
        out << "  segments: " << m.schedule->size() << "\n";
        out << "  eps_bar: " << rep.eps_bar << "\n";
        out << "  c_bar: " << rep.c_bar << "\n";
        for (const auto& o : rep.overrides)
            out << "  segment " << o.segment << " sampled min of 2rho+mu-sigma^2: " << o.sampled_min_margin << "\n";
        if (ctx.resolved.kappa)
            out << "  kappa: " << std::setprecision(7) << *ctx.resolved.kappa
                << (ctx.resolved.kappa_calibrated ? " (calibrated)" : " (given)") << "\n";
        if (!rep.ok) {
            out << "status: assumption violated: " << rep.message << "\n";
            return kExitFailed;
        }
    } else {
        const auto& chain = *m.chain;
        out << "  regime states: " << chain.size() << ", initial state " << chain.initial_state << "\n";
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const auto& p = chain.states[i];
            out << "    state " << i << ": rho=" << p.rho << " mu=" << p.mu << " sigma=" << p.sigma
                << " exit rate=" << chain.exit_rate(i) << "\n";
        }
    }
    out << "status: ok\n";
    return kExitOk;
}

int cmd_solve(const Context& ctx, Writer& w, std::ostream& out)
{
    const auto& m = ctx.model();
    out << std::setprecision(12);
    if (m.chain) {
        const auto surface = solve_regime_Y(*m.chain, m.horizon, ctx.grid());
        const auto bounds = check_regime_bounds(surface);
        w.csv("surface.csv", surface_table(surface));
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < surface.n_states; ++i) {
            PlotSeries s{"state " + std::to_string(i), surface.times, {}};
            for (std::size_t k = 0; k < surface.times.size(); ++k)
                s.y.push_back(surface.at(k, i));
            series.push_back(std::move(s));
        }
        w.svg("Y.svg", ctx.file.id + ": Y per regime state", series);
        for (std::size_t i = 0; i < surface.n_states; ++i)
            out << "Y_0[state " << i << "] = " << surface.at(0, i) << "\n";
        out << "bounds " << (bounds.ok ? "ok" : "VIOLATED") << " (worst excursion " << bounds.worst_violation << ")\n";
        return bounds.ok ? kExitOk : kExitFailed;
    }
    const auto& schedule = *m.schedule;
    const auto s = solve_schedule(schedule, ctx.grid());
    const auto rho = rho_path(schedule, s.grid);
    w.csv("Y.csv", cadlag_table(s.y));
    w.csv("beta.csv", cadlag_table(s.beta));
    w.csv("rho.csv", cadlag_table(rho));
    w.svg("Y.svg", ctx.file.id + ": Y", {plot_series("Y", s.y)});
    w.svg("beta.svg", ctx.file.id + ": beta", {plot_series("beta", s.beta)});
    w.svg("rho.svg", ctx.file.id + ": rho", {plot_series("rho", rho)});
    out << "Y_0 = " << s.y.values.front() << "\n";
    out << "beta_0 = " << s.beta.values.front() << "\n";
    out << "beta_T = " << s.beta.values.back() << "\n";
    out << "residual = " << bsde_residual(schedule, s.y) << "\n";
    try {
        double worst = 0.0;
        for (std::size_t k = 0; k < s.y.size(); ++k)
            worst = std::max(worst, std::abs(closed_form_Y(schedule, s.y.time(k)) - s.y.values[k]));
        out << "max |closed form - numerical| = " << worst << "\n";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::PreconditionViolated)
            throw;
    }
    if (schedule.has_override()) {
        const auto rep = verify_closure_identity(schedule, s.y);
        out << "closure identity residual = " << rep.identity_residual << ", value residual = " << rep.value_residual
            << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const Context& ctx, Writer& w, std::ostream& out, const RunOptions& options)
{
    const auto& m = ctx.model();
    const PathEngine engine(m, ctx.grid());
    const std::size_t n = m.deterministic() ? 1 : std::min<std::uint64_t>(ctx.file.run.paths, options.export_paths);
    std::vector<PlotSeries> xs, ds, gs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = engine.realize(ctx.file.run.seed, i);
        w.csv(path_name("path", i), path_table(r, m.ic));
        if (r.regime) {
            CsvTable t{{"time", "state"}, {}};
            t.rows.push_back({"0", std::to_string(m.chain->initial_state)});
            for (std::size_t j = 0; j < r.regime->jump_times.size(); ++j)
                t.rows.push_back({format_number(r.regime->jump_times[j]), std::to_string(r.regime->states[j + 1])});
            w.csv(path_name("regime", i), t);
        }
        if (i < 5) {
            const auto label = "path " + std::to_string(i);
            xs.push_back(plot_series(label, r.optimal.strategy));
            ds.push_back(plot_series(label, r.optimal.deviation));
            gs.push_back({label, r.grid->times, r.bundle.gamma});
        }
        out << "path " << i << ": X*_0 = " << std::setprecision(10) << r.optimal.strategy.values.front()
            << ", X*_{T-} = " << r.optimal.strategy.left_limits.back()
            << ", D*_T = " << r.optimal.deviation.values.back() << "\n";
    }
    w.svg("X.svg", ctx.file.id + ": optimal position X*", xs);
    w.svg("D.svg", ctx.file.id + ": deviation D*", ds);
    w.svg("gamma.svg", ctx.file.id + ": market depth gamma", gs);
    return kExitOk;
}

int cmd_cost(const Context& ctx, Writer& w, std::ostream& out, const RunOptions& options)
{
    const PathEngine engine(ctx.model(), ctx.grid());
    std::vector<StrategySpec> specs{{StrategyKind::Optimal, {}, 0.0}};
    for (auto kind : kBaselines)
        specs.push_back({kind, {}, 0.0});
    const CostConfig config{static_cast<std::size_t>(ctx.file.run.paths), ctx.file.run.seed, options.threads};
    const auto reports = expected_costs(engine, specs, config);
    w.csv("costs.csv", cost_table(ctx.file.id, reports));
    out << std::left << std::setw(12) << "strategy" << std::right << std::setw(16) << "mean" << std::setw(14)
        << "stderr" << std::setw(9) << "paths" << "\n";
    for (const auto& r : reports)
        out << std::left << std::setw(12) << r.strategy << std::right << std::setw(16) << std::setprecision(9)
            << r.mean << std::setw(14) << std::setprecision(3) << r.std_error << std::setw(9) << r.n_paths << "\n";
    bool minimal = true;
    for (std::size_t i = 1; i < reports.size(); ++i)
        minimal = minimal && reports[0].mean <= reports[i].mean + 3.0 * reports[i].std_error;
    out << "optimal strategy " << (minimal ? "is" : "is NOT") << " the cheapest (within 3 stderr)\n";
    return kExitOk;
}

int cmd_effects(const Context& ctx, Writer& w, std::ostream& out, const RunOptions& options)
{
    const auto& m = ctx.model();
    if (m.schedule) {
        const auto s = solve_schedule(*m.schedule, ctx.grid());
        const auto report = schedule_effects(*m.schedule, s.beta);
        w.csv("effects.csv", effects_table(ctx.file.id, report));
        w.text("effects.json", effects_json(ctx.file.id, report));
        out << ctx.file.id << ": " << flags(report) << "\n";
        out << "guarantees: " << to_string(report.positive_guarantee) << ", " << to_string(report.negative_trigger)
            << "\n";
        for (const auto& [a, b] : beta_above_one(s.beta))
            out << "beta > 1 on [" << a << ", " << b << ")\n";
        for (const auto& wt : report.witnesses)
            out << "  " << to_string(wt.kind) << " at t=" << wt.time << " (beta " << wt.beta_left << " -> "
                << wt.beta_right << ")\n";
        return kExitOk;
    }
    // β is random along a regime path, so effects are classified per sampled path.
    const PathEngine engine(m, ctx.grid());
    const std::size_t n = std::min<std::uint64_t>(ctx.file.run.paths, options.export_paths);
    CsvTable t{{"scenario", "path", "overjump", "premature", "witnesses", "first_witness_time"}, {}};
    json j;
    j["scenario"] = ctx.file.id;
    auto& arr = j["paths"] = json::array();
    std::size_t n_over = 0, n_prem = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = engine.realize(ctx.file.run.seed, i);
        const auto rep = classify_effects(*r.beta);
        n_over += rep.overjump;
        n_prem += rep.premature;
        t.rows.push_back({ctx.file.id, std::to_string(i), rep.overjump ? "true" : "false",
                          rep.premature ? "true" : "false", std::to_string(rep.witnesses.size()),
                          rep.witnesses.empty() ? "" : format_number(rep.witnesses.front().time)});
        arr.push_back({{"path", i}, {"overjump", rep.overjump}, {"premature", rep.premature},
                       {"witnesses", rep.witnesses.size()}});
    }
    j["overjump_fraction"] = static_cast<double>(n_over) / static_cast<double>(n);
    j["premature_fraction"] = static_cast<double>(n_prem) / static_cast<double>(n);
    w.csv("effects.csv", t);
    w.text("effects.json", j.dump(2) + "\n");
    out << ctx.file.id << ": " << n << " sampled regime paths, overjump on " << n_over << ", premature closure on "
        << n_prem << "\n";
    return kExitOk;
}

int cmd_reproduce(Writer& w, std::ostream& out, const RunOptions& options, std::vector<Context>& contexts)
{
    for (const auto& id : {"S1", "S2", "S3", "S4", "S5", "S6", "S7"})
        contexts.push_back(prepare(registered_scenario(id), options));

    CsvTable summary{{"scenario", "overjump", "premature", "kappa", "Y_0", "beta_0"}, {}};
    auto panel = [&](const std::string& fig, const std::string& id, const std::string& name, const std::string& title,
                     const CadlagPath& path) {
        w.csv(fig + "/" + id + "_" + name + ".csv", cadlag_table(path));
        w.svg(fig + "/" + id + "_" + name + ".svg", id + ": " + title, {plot_series(name, path)});
    };

    for (const auto& c : contexts) {
        const auto& schedule = *c.model().schedule;
        const auto s = solve_schedule(schedule, c.grid());
        const auto rep = schedule_effects(schedule, s.beta);
        summary.rows.push_back({c.file.id, rep.overjump ? "true" : "false", rep.premature ? "true" : "false",
                                c.resolved.kappa ? format_number(*c.resolved.kappa) : "",
                                format_number(s.y.values.front()), format_number(s.beta.values.front())});
        const PathEngine engine(c.model(), c.grid());
        const auto r = engine.realize(c.file.run.seed, 0);
        const auto rho = rho_path(schedule, s.grid);
        const auto x = as_cadlag(r.optimal.strategy);
        const auto d = as_cadlag(r.optimal.deviation);
        const auto& id = c.file.id;
        if (id == "S1" || id == "S2" || id == "S3") {
            panel("figure1", id, "rho", "rho", rho);
            panel("figure1", id, "beta", "beta", s.beta);
            panel("figure1", id, "X", "optimal position X*", x);
            panel("figure3", id, "D", "deviation D*", d);
            panel("figure3", id, "Y", "value Y", s.y);
        } else if (id == "S7") {
            panel("figure4", id, "rho", "rho", rho);
            panel("figure4", id, "beta", "beta", s.beta);
            panel("figure4", id, "X", "a path of X*", x);
            panel("figure4", id, "D", "the corresponding path of D*", d);
        } else {
            panel("figure2", id, "beta", "beta", s.beta);
            panel("figure2", id, "X", "a path of X*", x);
            panel("figure2", id, "D", "the corresponding path of D*", d);
        }
        out << id << ": " << flags(rep);
        if (c.resolved.kappa)
            out << " kappa=" << std::setprecision(7) << *c.resolved.kappa;
        out << "\n";
    }
    w.csv("summary.csv", summary);
    return kExitOk;
}

} // namespace

RunOutcome run_command(Command command, std::string_view scenario_ref, const RunOptions& options, std::ostream& out,
                       std::ostream& err)
{
    RunOutcome outcome;
    try {
        if (command == Command::ReproduceFigures) {
            std::vector<Context> contexts;
            contexts.reserve(7);
            Writer w(output_directory(nullptr, options), {"csv", "svg"});
            outcome.exit_code = cmd_reproduce(w, out, options, contexts);
            std::vector<const Context*> ptrs;
            for (const auto& c : contexts)
                ptrs.push_back(&c);
            write_provenance(w, command, ptrs, options.grid.value_or(RunSettings{}.grid),
                             options.paths.value_or(RunSettings{}.paths), options.seed.value_or(RunSettings{}.seed));
            outcome.directory = w.dir();
            outcome.files = w.files();
            out << "wrote " << outcome.files.size() << " files to " << w.dir().string() << "\n";
            return outcome;
        }

        const auto ctx = prepare(load_scenario_ref(scenario_ref), options);
        if (command == Command::Validate) {
            outcome.exit_code = cmd_validate(ctx, out);
            return outcome;
        }
        Writer w(output_directory(&ctx.file, options), ctx.file.outputs.formats);
        switch (command) {
        case Command::Solve: outcome.exit_code = cmd_solve(ctx, w, out); break;
        case Command::Simulate: outcome.exit_code = cmd_simulate(ctx, w, out, options); break;
        case Command::Cost: outcome.exit_code = cmd_cost(ctx, w, out, options); break;
        case Command::Effects: outcome.exit_code = cmd_effects(ctx, w, out, options); break;
        default: break;
        }
        write_provenance(w, command, {&ctx}, ctx.grid(), ctx.file.run.paths, ctx.file.run.seed);
        outcome.directory = w.dir();
        outcome.files = w.files();
        out << "wrote " << outcome.files.size() << " files to " << w.dir().string() << "\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        outcome.exit_code = kExitInvalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        outcome.exit_code = kExitInternal;
    }
    return outcome;
}

} // namespace negres
