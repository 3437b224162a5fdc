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
#include "negres/regime.hpp"
#include "negres/value_ode.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace negres {

/// One Monte Carlo realization of the market-depth noise. γ and ℰ(Q) are
/// built from the same Brownian increments.
struct PathBundle {
    std::shared_ptr<const TimeGrid> grid;
    /// W_{t_{k+1}} − W_{t_k}; all zero when σ ≡ 0.
    std::vector<double> dW;
    std::vector<double> gamma;
    /// Empty until exponential_Q() completes the bundle.
    std::vector<double> expQ;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

/// Exact lognormal steps γ_{t+h} = γ_t exp((μ − σ²/2)h + σΔW). Noise-free
/// schedules consume no random numbers.
PathBundle sample_gamma(const ParameterSchedule& schedule, std::shared_ptr<const TimeGrid> grid, double gamma0,
                        std::uint64_t seed, std::uint64_t path_index = 0);

/// ℰ(Q)_t = exp{−∫(β(μ+ρ−σ²) + ½β²σ²)ds − ∫βσ dW}: trapezoidal time integral,
/// left-point stochastic integral on the bundle's increments.
PathBundle exponential_Q(const BetaPath& beta, const ParameterSchedule& schedule, PathBundle bundle);

struct Jump {
    double time = 0.0;
    double left = 0.0;
    double right = 0.0;
};

/// Càdlàg position path with X_{0−} = x and X_T = 0.
struct StrategyPath {
    double x_at_0minus = 0.0;
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> values;
    std::vector<double> left_limits;
    std::vector<Jump> jumps;
};

struct DeviationPath {
    double d_at_0minus = 0.0;
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> values;
    std::vector<double> left_limits;
};

struct OptimalPair {
    StrategyPath strategy;
    DeviationPath deviation;
};

/// X*_t = (x − d/γ₀)(1 − β_t)ℰ(Q)_t and D*_t = −(x − d/γ₀)γ_tβ_tℰ(Q)_t on [0, T);
/// D*_T = −(x − d/γ₀)γ_Tℰ(Q)_T. Requires a completed bundle.
OptimalPair optimal_strategy_path(const InitialCondition& ic, const BetaPath& beta, const PathBundle& bundle);

struct Trade {
    double time = 0.0;
    double delta_x = 0.0;
};

using TradeList = std::vector<Trade>;

/// exp(−∫_{t_k}^{t_{k+1}} ρ ds) for every grid step.
std::vector<double> step_decay(const ParameterSchedule& schedule, const TimeGrid& grid);

/// Deviation of a pure-jump strategy: D decays by exp(−∫ρ) between grid
/// points and jumps by γ_t ΔX at each trade. Trades must sit on grid points.
/// Throws TradeOutsideHorizon for times outside [0, T].
DeviationPath deviation_of_trades(const InitialCondition& ic, const TradeList& trades, const PathBundle& bundle,
                                  const ParameterSchedule& schedule);

/// Model inputs: either a deterministic schedule or a regime chain.
struct Model {
    double horizon = 0.0;
    InitialCondition ic;
    std::optional<ParameterSchedule> schedule;
    std::optional<RegimeChain> chain;

    bool is_chain() const noexcept { return chain.has_value(); }
    /// σ ≡ 0 and no regime chain: a single path is exact.
    bool deterministic() const noexcept { return schedule && !chain && schedule->noise_free(); }
};

/// Everything computed along one path.
struct PathRealization {
    std::shared_ptr<const ParameterSchedule> schedule;
    std::shared_ptr<const TimeGrid> grid;
    std::shared_ptr<const ValuePath> value;
    std::shared_ptr<const BetaPath> beta;
    std::shared_ptr<const std::vector<double>> decay;
    std::optional<RegimePath> regime;
    PathBundle bundle;
    OptimalPair optimal;
};

/// Produces path realizations. For schedules, Y, β and the grid are computed
/// once; for chains the value surface is solved once and evaluated along each
/// sampled regime path. Stateless per call and safe to share across threads.
class PathEngine {
public:
    PathEngine(Model model, double steps_per_unit);

    const Model& model() const noexcept { return model_; }
    double steps_per_unit() const noexcept { return density_; }
    const RegimeValueSurface* surface() const noexcept { return surface_ ? &*surface_ : nullptr; }

    PathRealization realize(std::uint64_t seed, std::uint64_t path_index) const;

private:
    Model model_;
    double density_;
    std::shared_ptr<const ParameterSchedule> schedule_;
    std::shared_ptr<const TimeGrid> grid_;
    std::shared_ptr<const ValuePath> value_;
    std::shared_ptr<const BetaPath> beta_;
    std::shared_ptr<const std::vector<double>> decay_;
    std::optional<RegimeValueSurface> surface_;
};

} // namespace negres
