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

#include "negres/model.hpp"

#include "negres/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace negres {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::GapOrOverlap: return "GapOrOverlap";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::TradeOutsideHorizon: return "TradeOutsideHorizon";
    case ErrorCode::DegenerateY: return "DegenerateY";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

double ClosureRho::operator()(double t, double horizon) const
{
    return 1.0 / std::sqrt(kappa * std::exp(2.0 * (t - horizon)) + 1.0) - 1.0;
}

double ClosureRho::integral(double t0, double t1, double horizon) const
{
    // d/dt[-log(1 + u_t)] = ρ_t with u_t = sqrt(1 + κ e^{2(t-T)}).
    auto u = [&](double t) { return std::sqrt(1.0 + kappa * std::exp(2.0 * (t - horizon))); };
    return std::log1p(u(t0)) - std::log1p(u(t1));
}

namespace {

double boundary_tolerance(double horizon) { return 1e-12 * std::max(1.0, horizon); }

// Samples an override segment on a uniform grid including both endpoints.
OverrideCheck sample_override(const ParameterSegment& s, std::size_t index, double horizon,
                              std::size_t samples)
{
    OverrideCheck out;
    out.segment = index;
    out.sampled_min_margin = std::numeric_limits<double>::infinity();
    const std::size_t n = std::max<std::size_t>(samples, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.start + s.length() * static_cast<double>(k) / static_cast<double>(n - 1);
        const double rho = (*s.rho_formula)(t, horizon);
        out.sampled_min_margin = std::min(out.sampled_min_margin, 2.0 * rho + s.mu - s.sigma * s.sigma);
        out.sampled_max_abs_rho = std::max(out.sampled_max_abs_rho, std::abs(rho));
    }
    return out;
}

} // namespace

AssumptionReport validate_assumptions(std::span<const ParameterSegment> segments,
                                      std::size_t samples_per_override)
{
    AssumptionReport report;
    report.eps_bar = std::numeric_limits<double>::infinity();
    if (segments.empty()) {
        report.message = "no segments";
        return report;
    }
    double horizon = 0.0;
    for (const auto& s : segments)
        horizon = std::max(horizon, s.end);

    std::ostringstream msg;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        double margin = 2.0 * s.rho + s.mu - s.sigma * s.sigma;
        double abs_rho = std::abs(s.rho);
        if (s.has_override()) {
            const auto check = sample_override(s, i, horizon, samples_per_override);
            margin = check.sampled_min_margin;
            abs_rho = check.sampled_max_abs_rho;
            report.overrides.push_back(check);
        }
        if (!(margin > 0.0) && msg.tellp() == 0)
            msg << "segment " << i << " [" << s.start << ", " << s.end
                << "): 2*rho + mu - sigma^2 = " << margin << " <= 0";
        report.eps_bar = std::min(report.eps_bar, margin);
        report.c_bar = std::max({report.c_bar, abs_rho, std::abs(s.mu)});
    }
    report.ok = report.eps_bar > 0.0 && std::isfinite(report.c_bar);
    report.message = report.ok ? "ok" : msg.str();
    return report;
}

AssumptionReport validate_assumptions(const ParameterSchedule& schedule, std::size_t samples_per_override)
{
    return validate_assumptions(schedule.segments(), samples_per_override);
}

ParameterSchedule build_schedule(std::vector<ParameterSegment> segments, double horizon)
{
    if (segments.empty())
        throw Error(ErrorCode::InvalidArgument, "schedule needs at least one segment");
    if (!(horizon > 0.0))
        throw Error(ErrorCode::InvalidArgument, "horizon must be positive");

    std::sort(segments.begin(), segments.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });

    const double tol = boundary_tolerance(horizon);
    double cursor = 0.0;
    for (auto& s : segments) {
        if (!(s.start < s.end))
            throw Error(ErrorCode::GapOrOverlap, "segment with start >= end");
        if (std::abs(s.start - cursor) > tol) {
            std::ostringstream os;
            os << (s.start > cursor ? "gap" : "overlap") << " at t=" << cursor;
            throw Error(ErrorCode::GapOrOverlap, os.str());
        }
        s.start = cursor;
        cursor = s.end;
    }
    if (std::abs(cursor - horizon) > tol) {
        std::ostringstream os;
        os << "segments end at " << cursor << " but horizon is " << horizon;
        throw Error(ErrorCode::GapOrOverlap, os.str());
    }
    segments.back().end = horizon;

    const auto report = validate_assumptions(segments);
    if (!report.ok)
        throw Error(ErrorCode::AssumptionViolated, report.message);

    ParameterSchedule out;
    out.segments_ = std::move(segments);
    out.horizon_ = horizon;
    out.eps_bar_ = report.eps_bar;
    out.c_bar_ = report.c_bar;
    return out;
}

std::size_t ParameterSchedule::segment_index(double t) const
{
    if (!(t >= 0.0 && t <= horizon_)) {
        std::ostringstream os;
        os << "t=" << t << " outside [0, " << horizon_ << "]";
        throw Error(ErrorCode::OutOfRange, os.str());
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const ParameterSegment& s) { return v < s.start; });
    return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

Params ParameterSchedule::eval_in(std::size_t seg, double t) const
{
    const auto& s = segments_.at(seg);
    Params p{s.rho, s.mu, s.sigma};
    if (s.rho_formula)
        p.rho = (*s.rho_formula)(t, horizon_);
    return p;
}

Params ParameterSchedule::eval(double t) const { return eval_in(segment_index(t), t); }

Params ParameterSchedule::left_limit(double t) const
{
    const std::size_t i = segment_index(t);
    if (i > 0 && t == segments_[i].start)
        return eval_in(i - 1, t);
    return eval_in(i, t);
}

double ParameterSchedule::rho_integral(double t0, double t1) const
{
    if (t1 < t0)
        return -rho_integral(t1, t0);
    double total = 0.0;
    for (std::size_t i = segment_index(t0); i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        const double a = std::max(t0, s.start);
        const double b = std::min(t1, s.end);
        if (a >= b) {
            if (s.start >= t1)
                break;
            continue;
        }
        total += s.rho_formula ? s.rho_formula->integral(a, b, horizon_) : s.rho * (b - a);
    }
    return total;
}

std::vector<double> ParameterSchedule::boundaries() const
{
    std::vector<double> out;
    for (std::size_t i = 1; i < segments_.size(); ++i)
        out.push_back(segments_[i].start);
    return out;
}

bool ParameterSchedule::has_override() const noexcept
{
    return std::any_of(segments_.begin(), segments_.end(), [](const auto& s) { return s.has_override(); });
}

bool ParameterSchedule::noise_free() const noexcept
{
    return std::all_of(segments_.begin(), segments_.end(), [](const auto& s) { return s.sigma == 0.0; });
}

double ParameterSchedule::min_rho() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) {
        if (!s.rho_formula) {
            m = std::min(m, s.rho);
            continue;
        }
        for (std::size_t k = 0; k < kOverrideSamples; ++k) {
            const double t = s.start + s.length() * static_cast<double>(k) / (kOverrideSamples - 1);
            m = std::min(m, (*s.rho_formula)(t, horizon_));
        }
    }
    return m;
}

bool RegimeChain::has_noise() const noexcept
{
    return std::any_of(states.begin(), states.end(), [](const auto& p) { return p.sigma != 0.0; });
}

void validate_chain(const RegimeChain& chain)
{
    const std::size_t n = chain.size();
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "regime chain has no states");
    if (chain.generator.size() != n * n)
        throw Error(ErrorCode::InvalidArgument, "generator must be a square matrix matching the states");
    if (chain.initial_state >= n)
        throw Error(ErrorCode::InvalidArgument, "initial state out of range");
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double q = chain.rate(i, j);
            if (i != j && q < 0.0)
                throw Error(ErrorCode::InvalidArgument, "negative off-diagonal generator entry");
            row += q;
        }
        if (std::abs(row) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "generator row " + std::to_string(i) + " does not sum to zero");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(chain.states[i].convexity_margin() > 0.0))
            throw Error(ErrorCode::AssumptionViolated,
                        "state " + std::to_string(i) + ": 2*rho + mu - sigma^2 <= 0");
    }
}

void validate_initial_condition(const InitialCondition& ic)
{
    if (!(ic.gamma0 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "gamma0 must be strictly positive");
    if (!std::isfinite(ic.x) || !std::isfinite(ic.d))
        throw Error(ErrorCode::InvalidArgument, "x and d must be finite");
}

std::optional<std::size_t> TimeGrid::find(double t, double tol) const
{
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it != times.end() && std::abs(*it - t) <= tol)
        return static_cast<std::size_t>(std::distance(times.begin(), it));
    return std::nullopt;
}

TimeGrid make_grid(const ParameterSchedule& schedule, double steps_per_unit)
{
    if (!(steps_per_unit > 0.0))
        throw Error(ErrorCode::InvalidArgument, "grid density must be positive");
    TimeGrid grid;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& s = schedule.segment(i);
        const auto steps = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(s.length() * steps_per_unit - 1e-9)));
        const double h = s.length() / static_cast<double>(steps);
        for (std::size_t j = 0; j < steps; ++j) {
            grid.times.push_back(j == 0 ? s.start : s.start + h * static_cast<double>(j));
            grid.segment.push_back(i);
        }
    }
    grid.times.push_back(schedule.horizon());
    grid.segment.push_back(schedule.size() - 1);
    return grid;
}

} // namespace negres
