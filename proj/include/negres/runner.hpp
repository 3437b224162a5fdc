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

#include "negres/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace negres {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "NEGRES_OUT_DIR";

enum class Command { Validate, Solve, Simulate, Cost, Effects, ReproduceFigures };

/// Throws InvalidArgument for an unknown name.
Command parse_command(std::string_view name);
const char* to_string(Command command) noexcept;

/// Command-line overrides. Unset fields fall back to the scenario file.
struct RunOptions {
    std::optional<double> grid;
    std::optional<std::uint64_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    /// 0 selects the hardware concurrency.
    unsigned threads = 0;
    /// Upper bound on per-path CSVs written by `simulate` and on sampled
    /// regime paths classified by `effects`.
    std::size_t export_paths = 20;
};

struct RunOutcome {
    int exit_code = 0;
    std::filesystem::path directory;
    /// Written files, relative to `directory`, in write order.
    std::vector<std::string> files;
};

/// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInternal = 3;

/// Output directory precedence: explicit option, then the environment
/// variable, then the scenario's outputs.directory, then negres_out/<id>.
std::filesystem::path output_directory(const ScenarioFile* scenario, const RunOptions& options);

/// Runs a command on a scenario (file path or registered id; ignored by
/// reproduce-figures). Human-readable output goes to `out`, diagnostics to
/// `err`. Never throws.
RunOutcome run_command(Command command, std::string_view scenario_ref, const RunOptions& options, std::ostream& out,
                       std::ostream& err);

} // namespace negres
