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

#include "negres/effects.hpp"

#include "negres/error.hpp"

#include <algorithm>
#include <cmath>

namespace negres {

const char* to_string(GuaranteeTag tag) noexcept
{
    switch (tag) {
    case GuaranteeTag::None: return "none";
    case GuaranteeTag::NoOverjump: return "positive-resilience-no-overjump";
    case GuaranteeTag::NoEffects: return "positive-resilience-no-effects";
    case GuaranteeTag::ForcedEffect: return "negative-near-T-forces-effect";
    }
    return "none";
}

const char* to_string(WitnessKind kind) noexcept
{
    switch (kind) {
    case WitnessKind::Overjump: return "overjump";
    case WitnessKind::Touch: return "touch";
    case WitnessKind::Crossing: return "crossing";
    }
    return "unknown";
}

EffectReport classify_effects(const BetaPath& beta, double tol)
{
    EffectReport report;
    const auto& times = beta.grid->times;
    const std::size_t n = times.size();
    bool touching = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double left = k == 0 ? kBetaAt0Minus : beta.left_limits[k];
        // A continuous crossing strictly inside (t_{k−1}, t_k) lies before T even for k = n−1.
        if (k > 0) {
            const double a = 1.0 - beta.values[k - 1];
            const double b = 1.0 - left;
            if (a * b < 0.0) {
                report.premature = true;
                const double t = times[k - 1] + (times[k] - times[k - 1]) * a / (a - b);
                report.witnesses.push_back({WitnessKind::Crossing, t, beta.values[k - 1], left});
            }
        }
        if (k + 1 == n)
            break;
        const double right = beta.values[k];
        const double product = (1.0 - left) * (1.0 - right);
        if (product < -tol) {
            report.overjump = true;
            report.witnesses.push_back({WitnessKind::Overjump, times[k], left, right});
            touching = false;
        } else if (std::abs(product) <= tol) {
            report.premature = true;
            if (!touching)
                report.witnesses.push_back({WitnessKind::Touch, times[k], left, right});
            touching = true;
        } else {
            touching = false;
        }
    }
    return report;
}

std::vector<std::pair<double, double>> beta_above_one(const BetaPath& beta)
{
    std::vector<std::pair<double, double>> runs;
    const auto& times = beta.grid->times;
    bool open = false;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const bool above = beta.values[k] > 1.0;
        if (above && !open)
            runs.push_back({times[k], times[k]});
        if (!above && open)
            runs.back().second = times[k];
        open = above;
    }
    if (open)
        runs.back().second = times.back();
    return runs;
}

GuaranteeTag check_positive_resilience_guarantee(const ParameterSchedule& schedule)
{
    const double delta = schedule.min_rho();
    if (delta > 0.0)
        return GuaranteeTag::NoEffects;
    if (delta >= 0.0)
        return GuaranteeTag::NoOverjump;
    return GuaranteeTag::None;
}

GuaranteeTag check_negative_resilience_trigger(const ParameterSchedule& schedule)
{
    const std::size_t last = schedule.size() - 1;
    const double rho_end = schedule.eval_in(last, schedule.horizon()).rho;
    return rho_end < 0.0 ? GuaranteeTag::ForcedEffect : GuaranteeTag::None;
}

double value_at_segment_start(const ParameterSchedule& schedule, std::size_t segment, double steps_per_unit)
{
    const double t2 = schedule.segment(segment).start;
    std::vector<ParameterSegment> tail;
    for (std::size_t i = segment; i < schedule.size(); ++i) {
        auto s = schedule.segment(i);
        s.start -= t2;
        s.end -= t2;
        tail.push_back(s);
    }
    // Closure formulas depend on t − T only, so the shift leaves them unchanged.
    const auto shifted = build_schedule(std::move(tail), schedule.horizon() - t2);
    return solve_Y_backward(shifted, steps_per_unit).values.front();
}

double closure_kappa(double y_at_t2, double horizon, double t2)
{
    if (!(y_at_t2 > 0.0 && y_at_t2 < 0.5))
        throw Error(ErrorCode::DegenerateY, "Y at T2 must lie in (0, 1/2)");
    return std::exp(2.0 * (horizon - t2)) * (1.0 - 2.0 * y_at_t2) / (y_at_t2 * y_at_t2);
}

ClosureScenario build_premature_closure_scenario(double t1, double t2, double horizon, double sigma, double rho1,
                                                 double rho3, double steps_per_unit)
{
    if (!(0.0 < t1 && t1 < t2 && t2 < horizon))
        throw Error(ErrorCode::InvalidArgument, "need 0 < T1 < T2 < T");
    if (!(sigma * sigma > 0.0))
        throw Error(ErrorCode::InvalidArgument, "need sigma^2 > 0");
    if (!(rho1 > -1.0) || !(rho3 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "need rho1 > -1 and rho3 > 0");

    const double mu = sigma * sigma + 2.0;
    const auto last = build_schedule({{0.0, horizon - t2, rho3, mu, sigma, std::nullopt}}, horizon - t2);
    ClosureScenario out{last, 0.0, 0.0};
    out.y_at_t2 = solve_Y_backward(last, steps_per_unit).values.front();
    out.kappa = closure_kappa(out.y_at_t2, horizon, t2);
    out.schedule = build_schedule({{0.0, t1, rho1, mu, sigma, std::nullopt},
                                   {t1, t2, 0.0, mu, sigma, ClosureRho{out.kappa}},
                                   {t2, horizon, rho3, mu, sigma, std::nullopt}},
                                  horizon);
    return out;
}

ClosureIdentityReport verify_closure_identity(const ParameterSchedule& schedule, const ValuePath& y)
{
    const auto segs = schedule.segments();
    auto it = std::find_if(segs.begin(), segs.end(), [](const auto& s) { return s.has_override(); });
    if (it == segs.end())
        throw Error(ErrorCode::InvalidArgument, "schedule has no closure segment");
    const auto idx = static_cast<std::size_t>(std::distance(segs.begin(), it));
    const auto& seg = *it;
    const double horizon = schedule.horizon();

    ClosureIdentityReport report;
    const auto& grid = *y.grid;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.times[k];
        if (grid.segment[k] != idx || !(t > seg.start && t < seg.end))
            continue;
        const double rho = (*seg.rho_formula)(t, horizon);
        const double lhs = -seg.rho_formula->kappa * std::exp(2.0 * (t - horizon)) * std::pow(rho + 1.0, 3) /
                           ((rho + 2.0) * (rho + 2.0));
        const double rhs = rho * (rho + 1.0) / (rho + 2.0);
        report.identity_residual = std::max(report.identity_residual, std::abs(lhs - rhs));
        report.value_residual = std::max(report.value_residual, std::abs(y.values[k] - (rho + 1.0) / (rho + 2.0)));
    }
    return report;
}

} // namespace negres
