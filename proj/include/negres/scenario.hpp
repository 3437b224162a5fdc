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

#include "negres/model.hpp"
#include "negres/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace negres {

/// Closed-form resilience on a segment. Only the "closure" family exists;
/// a missing kappa means "calibrate so that β ≡ 1 on the segment".
struct RhoFormulaSpec {
    std::string family = "closure";
    std::optional<double> kappa;

    bool operator==(const RhoFormulaSpec&) const = default;
};

struct SegmentSpec {
    double start = 0.0;
    double end = 0.0;
    std::optional<double> rho;
    std::optional<RhoFormulaSpec> rho_formula;
    double mu = 0.0;
    double sigma = 0.0;

    bool operator==(const SegmentSpec&) const = default;
};

struct RunSettings {
    double grid = 4000.0;
    std::uint64_t paths = 10'000;
    std::uint64_t seed = 42;

    bool operator==(const RunSettings&) const = default;
};

struct OutputSettings {
    std::string directory;
    std::vector<std::string> formats{"csv", "svg"};

    bool operator==(const OutputSettings&) const = default;
};

struct ChainSpec {
    std::vector<Params> states;
    std::vector<std::vector<double>> generator;
    std::uint64_t initial_state = 0;

    bool operator==(const ChainSpec&) const;
};

/// Parsed scenario file. Exactly one of `segments` / `chain` is populated.
struct ScenarioFile {
    std::string id;
    std::string description;
    double horizon = 0.0;
    std::vector<SegmentSpec> segments;
    std::optional<ChainSpec> chain;
    InitialCondition ic;
    RunSettings run;
    OutputSettings outputs;

    bool operator==(const ScenarioFile&) const;
};

/// YAML text → ScenarioFile. Unknown keys and malformed values throw ParseError.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario(const std::filesystem::path& path);
std::string emit_scenario(const ScenarioFile& scenario);

/// Canonical scenarios S1–S7 and the regime-chain scenarios R1, R2.
std::vector<std::string> registered_ids();
/// Throws InvalidArgument for an unknown id.
ScenarioFile registered_scenario(std::string_view id);

/// A file path, or a registered id when no such file exists.
ScenarioFile load_scenario_ref(std::string_view ref);

struct ResolvedScenario {
    ScenarioFile file;
    Model model;
    /// κ of the closure segment, if any.
    std::optional<double> kappa;
    bool kappa_calibrated = false;
};

/// Builds and validates the model. Calibrated κ uses the run grid density.
ResolvedScenario resolve(const ScenarioFile& scenario);

} // namespace negres
