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
#include "negres/value_ode.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace negres {

/// Tolerance on (1 − β_{t−})(1 − β_t) below which the product counts as zero.
inline constexpr double kEffectTol = 1e-6;

enum class WitnessKind {
    /// (1 − β_{t−})(1 − β_t) < −tol at a grid point.
    Overjump,
    /// |(1 − β_{t−})(1 − β_t)| ≤ tol at a grid point.
    Touch,
    /// 1 − β changes sign between adjacent grid points.
    Crossing,
};

struct Witness {
    WitnessKind kind = WitnessKind::Overjump;
    double time = 0.0;
    double beta_left = 0.0;
    double beta_right = 0.0;
};

enum class GuaranteeTag {
    None,
    /// ρ ≥ 0: overjumping zero is ruled out.
    NoOverjump,
    /// ρ ≥ δ > 0: neither effect is optimal.
    NoEffects,
    /// ρ < 0 on the final segment: one of the effects is optimal.
    ForcedEffect,
};

const char* to_string(GuaranteeTag tag) noexcept;
const char* to_string(WitnessKind kind) noexcept;

struct EffectReport {
    bool overjump = false;
    bool premature = false;
    /// Consecutive touches are collapsed to the first point of the run.
    std::vector<Witness> witnesses;
    GuaranteeTag positive_guarantee = GuaranteeTag::None;
    GuaranteeTag negative_trigger = GuaranteeTag::None;
};

/// Classifies overjumping zero / premature closure from β on [0, T), with
/// β_{0−} = 0. Guarantee tags are left at None.
EffectReport classify_effects(const BetaPath& beta, double tol = kEffectTol);

/// Maximal runs of grid times in [0, T) with β_t > 1, as [first, next) pairs
/// where `next` is the first grid time after the run.
std::vector<std::pair<double, double>> beta_above_one(const BetaPath& beta);

GuaranteeTag check_positive_resilience_guarantee(const ParameterSchedule& schedule);
/// Deterministic schedules only: ForcedEffect iff ρ < 0 at the end of the final segment.
GuaranteeTag check_negative_resilience_trigger(const ParameterSchedule& schedule);

struct ClosureScenario {
    ParameterSchedule schedule;
    double kappa = 0.0;
    /// Y at the start of the last segment, from which κ is set.
    double y_at_t2 = 0.0;
};

/// Y_{T2} from the backward equation on [T2, T] (the only part that matters for it).
double value_at_segment_start(const ParameterSchedule& schedule, std::size_t segment, double steps_per_unit);

/// κ = e^{2(T−T2)}(1 − 2Y_{T2}) / Y_{T2}², the value that makes (ρ+1)/(ρ+2)
/// meet Y at T2. Throws DegenerateY unless Y_{T2} ∈ (0, 1/2).
double closure_kappa(double y_at_t2, double horizon, double t2);

/// Three-segment schedule with μ = σ² + 2, ρ = ρ1 on [0,T1), the closure
/// family on [T1,T2) and ρ3 on [T2,T], with κ calibrated so that β ≡ 1 on (T1,T2).
ClosureScenario build_premature_closure_scenario(double t1, double t2, double horizon, double sigma, double rho1,
                                                 double rho3, double steps_per_unit = 4000.0);

struct ClosureIdentityReport {
    /// max |−κe^{2(t−T)}(ρ+1)³/(ρ+2)² − ρ(ρ+1)/(ρ+2)| on the middle segment.
    double identity_residual = 0.0;
    /// max |Y − (ρ+1)/(ρ+2)| on the open middle segment.
    double value_residual = 0.0;

    double max() const noexcept { return std::max(identity_residual, value_residual); }
};

/// Checks the closed-position identity on grid points strictly inside the
/// (single) closure segment. Throws InvalidArgument if none is present.
ClosureIdentityReport verify_closure_identity(const ParameterSchedule& schedule, const ValuePath& y);

} // namespace negres
