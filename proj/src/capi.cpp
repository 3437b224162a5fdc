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

#include "negres/negres.h"

#include "negres/cost.hpp"
#include "negres/effects.hpp"
#include "negres/error.hpp"
#include "negres/io.hpp"
#include "negres/runner.hpp"
#include "negres/scenario.hpp"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <memory>

struct negres_scenario {
    negres::ResolvedScenario resolved;
};

struct negres_solution {
    std::shared_ptr<const negres::TimeGrid> grid;
    negres::ValuePath y;
    negres::BetaPath beta;
    std::vector<double> rho;
    std::vector<double> rho_left;
};

namespace {

thread_local std::string g_last_error;

negres_status fail(negres_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

negres_status ok()
{
    g_last_error.clear();
    return NEGRES_OK;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
negres_status guarded(F&& body) noexcept
{
    try {
        return body();
    } catch (const negres::Error& e) {
        return fail(static_cast<negres_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NEGRES_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NEGRES_INTERNAL, e.what());
    } catch (...) {
        return fail(NEGRES_INTERNAL, "unknown exception");
    }
}

negres_status null_arg(const char* name) { return fail(NEGRES_NULL_ARGUMENT, std::string(name) + " is NULL"); }

negres_status make_scenario(negres::ScenarioFile file, negres_scenario** out)
{
    auto handle = std::make_unique<negres_scenario>();
    handle->resolved = negres::resolve(file);
    *out = handle.release();
    return ok();
}

template <typename T>
negres_status copy_out(const T* data, std::size_t n, T* buf, std::size_t capacity, std::size_t* needed)
{
    if (needed)
        *needed = n;
    if (!buf)
        return ok();
    if (capacity < n)
        return fail(NEGRES_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(capacity) + ", need " +
                                                 std::to_string(n));
    std::memcpy(buf, data, n * sizeof(T));
    return ok();
}

negres_status copy_string(const std::string& s, char* buf, std::size_t capacity, std::size_t* needed)
{
    return copy_out(s.c_str(), s.size() + 1, buf, capacity, needed);
}

} // namespace

extern "C" {

const char* negres_version(void) { return negres::kVersion; }

const char* negres_status_string(negres_status status)
{
    switch (status) {
    case NEGRES_OK: return "ok";
    case NEGRES_NULL_ARGUMENT: return "null argument";
    case NEGRES_BUFFER_TOO_SMALL: return "buffer too small";
    case NEGRES_INTERNAL: return "internal error";
    default:
        if (status >= NEGRES_GAP_OR_OVERLAP && status <= NEGRES_IO_ERROR)
            return negres::to_string(static_cast<negres::ErrorCode>(status));
        return "unknown status";
    }
}

const char* negres_last_error(void) { return g_last_error.c_str(); }

negres_status negres_scenario_load_file(const char* path, negres_scenario** out)
{
    if (!path)
        return null_arg("path");
    if (!out)
        return null_arg("out");
    *out = nullptr;
    return guarded([&] { return make_scenario(negres::load_scenario(path), out); });
}

negres_status negres_scenario_load_text(const char* yaml, negres_scenario** out)
{
    if (!yaml)
        return null_arg("yaml");
    if (!out)
        return null_arg("out");
    *out = nullptr;
    return guarded([&] { return make_scenario(negres::parse_scenario(yaml), out); });
}

negres_status negres_scenario_load_registered(const char* id, negres_scenario** out)
{
    if (!id)
        return null_arg("id");
    if (!out)
        return null_arg("out");
    *out = nullptr;
    return guarded([&] { return make_scenario(negres::registered_scenario(id), out); });
}

void negres_scenario_free(negres_scenario* scenario) { delete scenario; }

negres_status negres_scenario_set_run(negres_scenario* scenario, double grid, uint64_t paths, uint64_t seed)
{
    if (!scenario)
        return null_arg("scenario");
    return guarded([&] {
        auto file = scenario->resolved.file;
        if (grid > 0.0)
            file.run.grid = grid;
        if (paths > 0)
            file.run.paths = paths;
        file.run.seed = seed;
        scenario->resolved = negres::resolve(file);
        return ok();
    });
}

negres_status negres_scenario_get_info(const negres_scenario* scenario, negres_scenario_info* out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    return guarded([&] {
        const auto& r = scenario->resolved;
        negres_scenario_info info{};
        info.horizon = r.model.horizon;
        info.grid = r.file.run.grid;
        info.paths = r.file.run.paths;
        info.seed = r.file.run.seed;
        if (r.model.schedule) {
            info.eps_bar = r.model.schedule->eps_bar();
            info.c_bar = r.model.schedule->c_bar();
            info.n_segments = r.model.schedule->size();
        }
        if (r.model.chain)
            info.n_states = r.model.chain->size();
        info.has_kappa = r.kappa.has_value();
        info.kappa = r.kappa.value_or(0.0);
        info.is_chain = r.model.is_chain();
        info.deterministic = r.model.deterministic();
        *out = info;
        return ok();
    });
}

negres_status negres_scenario_id(const negres_scenario* scenario, char* buf, size_t capacity, size_t* needed)
{
    if (!scenario)
        return null_arg("scenario");
    return guarded([&] { return copy_string(scenario->resolved.file.id, buf, capacity, needed); });
}

negres_status negres_scenario_emit(const negres_scenario* scenario, char* buf, size_t capacity, size_t* needed)
{
    if (!scenario)
        return null_arg("scenario");
    return guarded([&] { return copy_string(negres::emit_scenario(scenario->resolved.file), buf, capacity, needed); });
}

negres_status negres_solve(const negres_scenario* scenario, negres_solution** out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const auto& model = scenario->resolved.model;
        if (!model.schedule)
            return fail(NEGRES_INVALID_ARGUMENT, "negres_solve needs a deterministic schedule, not a regime chain");
        const auto& schedule = *model.schedule;
        auto s = std::make_unique<negres_solution>();
        s->grid = std::make_shared<const negres::TimeGrid>(negres::make_grid(schedule, scenario->resolved.file.run.grid));
        s->y = negres::solve_Y_backward(schedule, s->grid);
        s->beta = negres::beta_from_Y(schedule, s->y);
        const auto rho = negres::parameter_table(schedule, *s->grid, negres::ParamField::Rho);
        s->rho = rho.numeric_column("value");
        s->rho_left = rho.numeric_column("left_limit");
        *out = s.release();
        return ok();
    });
}

void negres_solution_free(negres_solution* solution) { delete solution; }

size_t negres_solution_size(const negres_solution* solution) { return solution ? solution->y.size() : 0; }

negres_status negres_solution_series(const negres_solution* solution, negres_series series, double* buf,
                                     size_t capacity, size_t* needed)
{
    if (!solution)
        return null_arg("solution");
    const std::vector<double>* v = nullptr;
    switch (series) {
    case NEGRES_SERIES_TIME: v = &solution->grid->times; break;
    case NEGRES_SERIES_Y: v = &solution->y.values; break;
    case NEGRES_SERIES_Y_LEFT: v = &solution->y.left_limits; break;
    case NEGRES_SERIES_BETA: v = &solution->beta.values; break;
    case NEGRES_SERIES_BETA_LEFT: v = &solution->beta.left_limits; break;
    case NEGRES_SERIES_RHO: v = &solution->rho; break;
    case NEGRES_SERIES_RHO_LEFT: v = &solution->rho_left; break;
    }
    if (!v)
        return fail(NEGRES_INVALID_ARGUMENT, "unknown series");
    return copy_out(v->data(), v->size(), buf, capacity, needed);
}

negres_status negres_closed_form_y(const negres_scenario* scenario, double t, double* out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    return guarded([&] {
        const auto& model = scenario->resolved.model;
        if (!model.schedule)
            return fail(NEGRES_PRECONDITION_VIOLATED, "closed form needs a deterministic schedule");
        *out = negres::closed_form_Y(*model.schedule, t);
        return ok();
    });
}

negres_status negres_classify_effects(const negres_scenario* scenario, const negres_solution* solution,
                                      negres_effects* out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!solution)
        return null_arg("solution");
    if (!out)
        return null_arg("out");
    return guarded([&] {
        const auto& model = scenario->resolved.model;
        if (!model.schedule)
            return fail(NEGRES_INVALID_ARGUMENT, "effects of a regime chain are classified per sampled path");
        const auto rep = negres::classify_effects(solution->beta);
        negres_effects e{};
        e.overjump = rep.overjump;
        e.premature = rep.premature;
        e.n_witnesses = rep.witnesses.size();
        e.first_witness_time =
            rep.witnesses.empty() ? std::numeric_limits<double>::quiet_NaN() : rep.witnesses.front().time;
        e.positive_guarantee = static_cast<int>(negres::check_positive_resilience_guarantee(*model.schedule));
        e.negative_trigger = static_cast<int>(negres::check_negative_resilience_trigger(*model.schedule));
        *out = e;
        return ok();
    });
}

negres_status negres_expected_cost(const negres_scenario* scenario, negres_strategy strategy, unsigned threads,
                                   negres_cost* out)
{
    if (!scenario)
        return null_arg("scenario");
    if (!out)
        return null_arg("out");
    if (strategy < NEGRES_STRATEGY_OPTIMAL || strategy > NEGRES_STRATEGY_TWO_BLOCKS)
        return fail(NEGRES_INVALID_ARGUMENT, "unknown strategy");
    return guarded([&] {
        const auto& r = scenario->resolved;
        const negres::PathEngine engine(r.model, r.file.run.grid);
        const negres::StrategySpec spec{static_cast<negres::StrategyKind>(strategy), {}, 0.0};
        const negres::CostConfig config{static_cast<std::size_t>(r.file.run.paths), r.file.run.seed, threads};
        const auto rep = negres::expected_cost(engine, spec, config);
        *out = {rep.mean, rep.std_error, rep.components.deviation, rep.components.quadratic, rep.n_paths};
        return ok();
    });
}

negres_status negres_run_command(const char* command, const char* scenario_ref, const negres_run_options* options,
                                 int* exit_code)
{
    if (!command)
        return null_arg("command");
    if (!exit_code)
        return null_arg("exit_code");
    return guarded([&] {
        const auto cmd = negres::parse_command(command);
        if (cmd != negres::Command::ReproduceFigures && !scenario_ref)
            return null_arg("scenario_ref");
        negres::RunOptions opts;
        if (options) {
            if (options->grid > 0.0)
                opts.grid = options->grid;
            if (options->paths > 0)
                opts.paths = options->paths;
            if (options->has_seed)
                opts.seed = options->seed;
            if (options->out_dir)
                opts.out = options->out_dir;
            opts.threads = options->threads;
        }
        const auto outcome = negres::run_command(cmd, scenario_ref ? scenario_ref : "", opts, std::cout, std::cerr);
        std::cout.flush();
        *exit_code = outcome.exit_code;
        return ok();
    });
}

} // extern "C"
