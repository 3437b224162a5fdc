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

#include "negres/simulate.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace negres {

/// Trades X_{t_k} − X_{t_{k−1}} at every grid point (X_{t_{−1}} := x), with the
/// final trade closing the position. Zero trades are omitted.
TradeList discretize_strategy(const StrategyPath& x);

struct CostComponents {
    /// Σ D_{t−} ΔX
    double deviation = 0.0;
    /// Σ γ_t (ΔX)² / 2
    double quadratic = 0.0;

    double total() const noexcept { return deviation + quadratic; }
};

/// Exact cost of a pure-jump strategy. Trades at the same time are executed
/// in list order. Throws InvalidArgument when the trades do not close x.
CostComponents cost_components(const TradeList& trades, const PathBundle& bundle, const ParameterSchedule& schedule,
                               const InitialCondition& ic);
double cost_of_trades(const TradeList& trades, const PathBundle& bundle, const ParameterSchedule& schedule,
                      const InitialCondition& ic);

enum class StrategyKind {
    Optimal,
    BlockAtStart,
    BlockAtEnd,
    Twap,
    TwoBlocks,
};

const char* strategy_id(StrategyKind kind) noexcept;
inline constexpr StrategyKind kBaselines[] = {StrategyKind::BlockAtStart, StrategyKind::BlockAtEnd,
                                              StrategyKind::Twap, StrategyKind::TwoBlocks};

/// A strategy to price: a named kind plus an optional round-trip overlay
/// scaled by `overlay_scale` (used for perturbations of the optimum).
struct StrategySpec {
    StrategyKind kind = StrategyKind::Optimal;
    TradeList overlay;
    double overlay_scale = 0.0;
};

/// Trade list for `kind` on the realization's grid.
TradeList strategy_trades(StrategyKind kind, const PathRealization& path, const InitialCondition& ic);

struct CostReport {
    std::string strategy;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    CostComponents components;
};

struct CostConfig {
    std::size_t n_paths = 10'000;
    std::uint64_t seed = 42;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Expected cost of each strategy over common paths. Deterministic models are
/// evaluated once (n_paths = 1, stderr = 0); otherwise the mean and standard
/// error over `n_paths` realizations, reduced by pairwise summation so the
/// result does not depend on the worker count.
std::vector<CostReport> expected_costs(const PathEngine& engine, std::span<const StrategySpec> strategies,
                                       const CostConfig& config);
CostReport expected_cost(const PathEngine& engine, const StrategySpec& strategy, const CostConfig& config);

struct DirectionResult {
    std::vector<double> eps;
    std::vector<double> costs;
    /// (J(ε) − J(−ε)) / 2ε for the largest symmetric pair.
    double first_derivative = 0.0;
    /// J(ε) − 2J(0) + J(−ε) for the largest symmetric pair.
    double second_difference = 0.0;
};

struct PerturbationReport {
    double base_cost = 0.0;
    std::vector<DirectionResult> directions;
};

/// Prices X* + ε·direction for each ε in `eps_grid`. Each direction must be a
/// round trip (zero net position change) on the engine's grid.
PerturbationReport perturbation_test(const PathEngine& engine, std::span<const TradeList> directions,
                                     std::span<const double> eps_grid, const CostConfig& config);

/// Sum with pairwise (cascade) reduction.
double pairwise_sum(std::span<const double> values);

} // namespace negres
