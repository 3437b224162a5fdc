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

#include "negres/value_ode.hpp"

#include "negres/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace negres {

namespace {

double denominator(const Params& p, double y)
{
    return p.sigma * p.sigma * y + 0.5 * p.convexity_margin();
}

} // namespace

double value_driver(const Params& p, double y)
{
    const double den = denominator(p, y);
    if (!(den > 0.0)) {
        std::ostringstream os;
        os << "driver denominator " << den << " <= 0 at Y=" << y;
        throw Error(ErrorCode::StepFailure, os.str());
    }
    const double a = p.rho + p.mu;
    return a * a * y * y / den - p.mu * y;
}

double beta_of(const Params& p, double y)
{
    const double den = denominator(p, y);
    if (!(den > 0.0))
        throw Error(ErrorCode::StepFailure, "beta denominator <= 0");
    return (p.rho + p.mu) * y / den;
}

double closed_form_Y(const ParameterSchedule& schedule, double t)
{
    const auto segs = schedule.segments();
    const double mu = segs.front().mu;
    for (const auto& s : segs) {
        if (s.sigma != 0.0)
            throw Error(ErrorCode::PreconditionViolated, "closed form needs sigma = 0");
        if (s.mu != mu || !(mu > 0.0))
            throw Error(ErrorCode::PreconditionViolated, "closed form needs a constant mu > 0");
        if (s.has_override())
            throw Error(ErrorCode::PreconditionViolated, "closed form needs piecewise-constant rho");
        if (!(s.rho + 0.5 * mu >= 1e-9))
            throw Error(ErrorCode::PreconditionViolated, "closed form needs rho > -mu/2");
    }
    const double horizon = schedule.horizon();
    if (!(t >= 0.0 && t <= horizon))
        throw Error(ErrorCode::OutOfRange, "t outside [0, T]");
    if (t == horizon)
        return 0.5;

    // Σ over segments ending after t of (ρ_i+μ)²/(μ(ρ_i+μ/2)) (e^{(T−a)μ} − e^{(T−b)μ}),
    // with a = max(t, T_{i−1}), b = T_i.
    double sum = 2.0;
    for (const auto& s : segs) {
        if (s.end <= t)
            continue;
        const double a = std::max(t, s.start);
        const double r = s.rho + mu;
        sum += r * r / (mu * (s.rho + 0.5 * mu)) *
               (std::exp((horizon - a) * mu) - std::exp((horizon - s.end) * mu));
    }
    return std::exp((horizon - t) * mu) / sum;
}

ValuePath solve_Y_backward(const ParameterSchedule& schedule, double steps_per_unit)
{
    return solve_Y_backward(schedule, std::make_shared<const TimeGrid>(make_grid(schedule, steps_per_unit)));
}

ValuePath solve_Y_backward(const ParameterSchedule& schedule, std::shared_ptr<const TimeGrid> grid)
{
    const auto& t = grid->times;
    const std::size_t n = t.size();
    ValuePath out;
    out.grid = grid;
    out.values.assign(n, 0.0);
    out.values[n - 1] = 0.5;

    double y = 0.5;
    for (std::size_t k = n - 1; k-- > 0;) {
        const std::size_t seg = grid->segment[k];
        const double t1 = t[k + 1];
        const double h = t1 - t[k];
        const double tm = t1 - 0.5 * h;
        const auto p1 = schedule.eval_in(seg, t1);
        const auto pm = schedule.eval_in(seg, tm);
        const auto p0 = schedule.eval_in(seg, t[k]);
        const double k1 = value_driver(p1, y);
        const double k2 = value_driver(pm, y - 0.5 * h * k1);
        const double k3 = value_driver(pm, y - 0.5 * h * k2);
        const double k4 = value_driver(p0, y - h * k3);
        y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(y >= -kValueBoundTol && y <= 0.5 + kValueBoundTol)) {
            std::ostringstream os;
            os << "Y=" << y << " left [0, 1/2] at t=" << t[k];
            throw Error(ErrorCode::StepFailure, os.str());
        }
        out.values[k] = y;
    }
    out.left_limits = out.values;
    return out;
}

BetaPath beta_from_Y(const ParameterSchedule& schedule, const ValuePath& y)
{
    const auto& grid = *y.grid;
    const std::size_t n = grid.size();
    if (y.values.size() != n || y.left_limits.size() != n)
        throw Error(ErrorCode::InvalidArgument, "value path does not match its grid");
    BetaPath out;
    out.grid = y.grid;
    out.values.resize(n);
    out.left_limits.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = grid.times[k];
        out.values[k] = beta_of(schedule.eval_in(grid.segment[k], t), y.values[k]);
        if (k == 0)
            out.left_limits[k] = kBetaAt0Minus;
        else
            out.left_limits[k] = beta_of(schedule.eval_in(grid.segment[k - 1], t), y.left_limits[k]);
    }
    return out;
}

double bsde_residual(const ParameterSchedule& schedule, const ValuePath& y)
{
    const auto& grid = *y.grid;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        // Both neighbours must lie in the closure of the segment owning t_k.
        if (grid.segment[k - 1] != grid.segment[k])
            continue;
        const std::size_t seg = grid.segment[k];
        const double slope = (y.left_limits[k + 1] - y.values[k - 1]) / (grid.times[k + 1] - grid.times[k - 1]);
        const double drift = value_driver(schedule.eval_in(seg, grid.times[k]), y.values[k]);
        worst = std::max(worst, std::abs(slope - drift));
    }
    return worst;
}

} // namespace negres
