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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace negres {

/// Instantaneous model coefficients: resilience, drift and volatility of the
/// market-depth process.
struct Params {
    double rho = 0.0;
    double mu = 0.0;
    double sigma = 0.0;

    /// 2ρ + μ − σ², the quantity bounded below by ε̄.
    double convexity_margin() const noexcept { return 2.0 * rho + mu - sigma * sigma; }
};

/// Resilience family ρ_t = (κ·e^{2(t−T)} + 1)^{−1/2} − 1 used on a segment
/// where the optimal position is meant to stay closed.
struct ClosureRho {
    double kappa = 0.0;

    double operator()(double t, double horizon) const;
    /// Exact ∫_{t0}^{t1} ρ_s ds.
    double integral(double t0, double t1, double horizon) const;
};

struct ParameterSegment {
    double start = 0.0;
    double end = 0.0;
    double rho = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    /// When set, replaces the constant `rho` on this segment.
    std::optional<ClosureRho> rho_formula;

    double length() const noexcept { return end - start; }
    bool has_override() const noexcept { return rho_formula.has_value(); }
};

/// Points per override segment used when checking the pointwise bounds.
inline constexpr std::size_t kOverrideSamples = 10'000;

struct OverrideCheck {
    std::size_t segment = 0;
    double sampled_min_margin = 0.0;
    double sampled_max_abs_rho = 0.0;
};

struct AssumptionReport {
    bool ok = false;
    double eps_bar = 0.0;
    double c_bar = 0.0;
    std::vector<OverrideCheck> overrides;
    std::string message;
};

/// Piecewise description of (ρ, μ, σ) on [0, T]. Immutable once built;
/// construct through build_schedule().
class ParameterSchedule {
public:
    double horizon() const noexcept { return horizon_; }
    double eps_bar() const noexcept { return eps_bar_; }
    double c_bar() const noexcept { return c_bar_; }
    std::span<const ParameterSegment> segments() const noexcept { return segments_; }
    const ParameterSegment& segment(std::size_t i) const { return segments_.at(i); }
    std::size_t size() const noexcept { return segments_.size(); }

    /// Index of the segment containing t (right-continuous; T maps to the last one).
    std::size_t segment_index(double t) const;

    /// Right-continuous evaluation. Throws OutOfRange outside [0, T].
    Params eval(double t) const;
    /// Left limit at t; equals eval(t) except at segment boundaries. At t = 0
    /// returns eval(0).
    Params left_limit(double t) const;
    /// Coefficients of segment `seg` continued to the closed interval [start, end].
    Params eval_in(std::size_t seg, double t) const;

    /// Exact ∫_{t0}^{t1} ρ_s ds for 0 ≤ t0 ≤ t1 ≤ T.
    double rho_integral(double t0, double t1) const;

    /// Interior segment boundaries T_1 < ... < T_{N-1}.
    std::vector<double> boundaries() const;

    bool has_override() const noexcept;
    /// σ ≡ 0 on every segment.
    bool noise_free() const noexcept;
    /// Smallest value of ρ over the schedule (sampled on override segments).
    double min_rho() const;

private:
    friend ParameterSchedule build_schedule(std::vector<ParameterSegment>, double);

    std::vector<ParameterSegment> segments_;
    double horizon_ = 0.0;
    double eps_bar_ = 0.0;
    double c_bar_ = 0.0;
};

/// Sorts the segments, checks that they partition [0, T) and that
/// 2ρ + μ − σ² ≥ ε̄ > 0. Throws GapOrOverlap / AssumptionViolated.
ParameterSchedule build_schedule(std::vector<ParameterSegment> segments, double horizon);

AssumptionReport validate_assumptions(std::span<const ParameterSegment> segments,
                                      std::size_t samples_per_override = kOverrideSamples);
AssumptionReport validate_assumptions(const ParameterSchedule& schedule,
                                      std::size_t samples_per_override = kOverrideSamples);

/// Finite-state Markov chain driving (ρ, μ, σ), independent of W.
struct RegimeChain {
    std::vector<Params> states;
    /// Row-major n×n generator; off-diagonal rates ≥ 0, rows sum to zero.
    std::vector<double> generator;
    std::size_t initial_state = 0;

    std::size_t size() const noexcept { return states.size(); }
    double rate(std::size_t i, std::size_t j) const { return generator.at(i * size() + j); }
    double exit_rate(std::size_t i) const { return -rate(i, i); }
    bool has_noise() const noexcept;
};

/// Throws InvalidArgument for a malformed generator and AssumptionViolated when
/// a state breaks the standing bounds.
void validate_chain(const RegimeChain& chain);

struct InitialCondition {
    double x = 1.0;
    double d = 0.0;
    double gamma0 = 1.0;

    /// x − d/γ₀, the scale of the optimal strategy.
    double prefactor() const noexcept { return x - d / gamma0; }
};

void validate_initial_condition(const InitialCondition& ic);

/// Time grid refining every segment boundary, uniform inside each segment.
struct TimeGrid {
    std::vector<double> times;
    /// segment[k] owns [t_k, t_{k+1}); the final point belongs to the last segment.
    std::vector<std::size_t> segment;

    std::size_t size() const noexcept { return times.size(); }
    double horizon() const { return times.back(); }
    /// True when t_k is an interior segment boundary.
    bool is_boundary(std::size_t k) const noexcept {
        return k > 0 && k + 1 < times.size() && segment[k - 1] != segment[k];
    }
    /// Index of the grid point equal to t within tol, if any.
    std::optional<std::size_t> find(double t, double tol = 1e-9) const;
};

/// ceil(length · steps_per_unit) uniform steps per segment, at least one.
TimeGrid make_grid(const ParameterSchedule& schedule, double steps_per_unit);

} // namespace negres
