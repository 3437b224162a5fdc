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

// Command-line front end. Talks to the engine only through the C API.

#include "negres/negres.h"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"negres: optimal execution with signed resilience"};
    app.set_version_flag("--version", std::string(negres_version()));
    app.require_subcommand(1);

    std::string scenario;
    std::optional<double> grid;
    std::optional<std::uint64_t> paths;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"validate", "check a scenario and print its bounds"},
        {"solve", "solve Y and beta, write CSV and plots"},
        {"simulate", "sample optimal strategy paths"},
        {"cost", "expected cost of the optimum and baselines"},
        {"effects", "classify overjumping zero and premature closure"},
        {"reproduce-figures", "rebuild all figure panels from the registered scenarios"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        const bool needs_scenario = std::string(c.name) != "reproduce-figures";
        auto* pos = sub->add_option("scenario", scenario, "scenario file, or a registered id (S1..S7, R1, R2)");
        if (needs_scenario)
            pos->required();
        sub->add_option("--grid", grid, "steps per unit time")->check(CLI::PositiveNumber);
        sub->add_option("--paths", paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    }

    CLI11_PARSE(app, argc, argv);

    const auto* chosen = app.get_subcommands().front();
    negres_run_options options{};
    options.grid = grid.value_or(0.0);
    options.paths = paths.value_or(0);
    options.has_seed = seed.has_value();
    options.seed = seed.value_or(0);
    options.out_dir = out.empty() ? nullptr : out.c_str();
    options.threads = threads;

    int exit_code = 0;
    const auto status = negres_run_command(chosen->get_name().c_str(), scenario.c_str(), &options, &exit_code);
    if (status != NEGRES_OK) {
        std::cerr << "error: " << negres_last_error() << "\n";
        return 2;
    }
    return exit_code;
}
