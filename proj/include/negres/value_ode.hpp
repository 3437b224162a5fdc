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

#include <memory>
#include <vector>

namespace negres {

/// Grid representation of a càdlàg process: right-continuous values plus the
/// left limit at every grid time.
struct CadlagPath {
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> values;
    std::vector<double> left_limits;

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t k) const { return grid->times[k]; }
};

/// Y on a grid. Continuous for deterministic schedules; jumps at regime
/// switches when evaluated along a Markov-chain path.
using ValuePath = CadlagPath;

/// β on a grid; left_limits[0] carries β_{0−} = 0.
using BetaPath = CadlagPath;

inline constexpr double kBetaAt0Minus = 0.0;
inline constexpr double kValueBoundTol = 1e-10;

/// Right-hand side of the backward equation for Y:
/// dY/dt = (ρ+μ)²Y² / (σ²Y + ½(2ρ+μ−σ²)) − μY.
/// Throws StepFailure if the denominator is not positive.
double value_driver(const Params& p, double y);

/// β = (ρ+μ)Y / (σ²Y + ½(2ρ+μ−σ²)).
double beta_of(const Params& p, double y);

/// Closed-form Y for σ ≡ 0, constant μ > 0 and piecewise-constant ρ > −μ/2.
/// Throws PreconditionViolated otherwise.
double closed_form_Y(const ParameterSchedule& schedule, double t);

/// Backward classical RK4 from Y_T = 1/2, fixed step inside each segment.
/// Throws StepFailure when a denominator turns non-positive or Y leaves
/// [0, 1/2] by more than kValueBoundTol.
ValuePath solve_Y_backward(const ParameterSchedule& schedule, double steps_per_unit);
ValuePath solve_Y_backward(const ParameterSchedule& schedule, std::shared_ptr<const TimeGrid> grid);

/// β from Y; left limits at boundaries use the left segment's coefficients.
BetaPath beta_from_Y(const ParameterSchedule& schedule, const ValuePath& y);

/// Largest |central difference of Y − driver| over interior points of each segment.
double bsde_residual(const ParameterSchedule& schedule, const ValuePath& y);

} // namespace negres
