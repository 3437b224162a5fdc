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

#include "negres/simulate.hpp"

#include "negres/error.hpp"
#include "negres/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace negres {

PathBundle sample_gamma(const ParameterSchedule& schedule, std::shared_ptr<const TimeGrid> grid, double gamma0,
                        std::uint64_t seed, std::uint64_t path_index)
{
    if (!(gamma0 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "gamma0 must be strictly positive");
    const auto& g = *grid;
    const std::size_t n = g.size();
    PathBundle b;
    b.grid = grid;
    b.seed = seed;
    b.path_index = path_index;
    b.dW.assign(n - 1, 0.0);
    b.gamma.resize(n);
    b.gamma[0] = gamma0;

    const bool noisy = !schedule.noise_free();
    RandomStream rng(seed, path_index, StreamPurpose::Brownian);
    double log_gamma = std::log(gamma0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = g.times[k + 1] - g.times[k];
        const auto& s = schedule.segment(g.segment[k]);
        if (noisy)
            b.dW[k] = std::sqrt(h) * rng.normal();
        log_gamma += (s.mu - 0.5 * s.sigma * s.sigma) * h + s.sigma * b.dW[k];
        b.gamma[k + 1] = std::exp(log_gamma);
    }
    return b;
}

PathBundle exponential_Q(const BetaPath& beta, const ParameterSchedule& schedule, PathBundle bundle)
{
    const auto& g = *bundle.grid;
    const std::size_t n = g.size();
    if (beta.size() != n || bundle.dW.size() + 1 != n)
        throw Error(ErrorCode::InvalidArgument, "beta path and bundle grids differ");

    auto rate = [](const Params& p, double b) {
        return b * (p.mu + p.rho - p.sigma * p.sigma) + 0.5 * b * b * p.sigma * p.sigma;
    };
    bundle.expQ.resize(n);
    bundle.expQ[0] = 1.0;
    double log_e = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t seg = g.segment[k];
        const double h = g.times[k + 1] - g.times[k];
        const auto p0 = schedule.eval_in(seg, g.times[k]);
        const auto p1 = schedule.eval_in(seg, g.times[k + 1]);
        const double drift = 0.5 * h * (rate(p0, beta.values[k]) + rate(p1, beta.left_limits[k + 1]));
        log_e -= drift + beta.values[k] * p0.sigma * bundle.dW[k];
        bundle.expQ[k + 1] = std::exp(log_e);
    }
    return bundle;
}

OptimalPair optimal_strategy_path(const InitialCondition& ic, const BetaPath& beta, const PathBundle& bundle)
{
    const std::size_t n = bundle.grid->size();
    if (bundle.expQ.size() != n)
        throw Error(ErrorCode::InvalidArgument, "bundle has no stochastic exponential");
    if (beta.size() != n)
        throw Error(ErrorCode::InvalidArgument, "beta path and bundle grids differ");

    const double c = ic.prefactor();
    const auto& times = bundle.grid->times;
    OptimalPair out;
    auto& x = out.strategy;
    auto& d = out.deviation;
    x.x_at_0minus = ic.x;
    d.d_at_0minus = ic.d;
    x.grid = d.grid = bundle.grid;
    x.values.resize(n);
    x.left_limits.resize(n);
    d.values.resize(n);
    d.left_limits.resize(n);

    for (std::size_t k = 0; k < n; ++k) {
        const double e = bundle.expQ[k];
        const double gamma = bundle.gamma[k];
        const bool terminal = k + 1 == n;
        x.values[k] = terminal ? 0.0 : c * (1.0 - beta.values[k]) * e;
        d.values[k] = terminal ? -c * gamma * e : -c * gamma * beta.values[k] * e;
        if (k == 0) {
            x.left_limits[k] = ic.x;
            d.left_limits[k] = ic.d;
        } else {
            x.left_limits[k] = c * (1.0 - beta.left_limits[k]) * e;
            d.left_limits[k] = -c * gamma * beta.left_limits[k] * e;
        }
        if (k == 0 || terminal || bundle.grid->is_boundary(k)) {
            if (terminal || x.left_limits[k] != x.values[k])
                x.jumps.push_back({times[k], x.left_limits[k], x.values[k]});
        }
    }
    return out;
}

std::vector<double> step_decay(const ParameterSchedule& schedule, const TimeGrid& grid)
{
    std::vector<double> out(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const auto& s = schedule.segment(grid.segment[k]);
        const double integral = s.rho_formula
                                    ? s.rho_formula->integral(grid.times[k], grid.times[k + 1], schedule.horizon())
                                    : s.rho * (grid.times[k + 1] - grid.times[k]);
        out[k] = std::exp(-integral);
    }
    return out;
}

DeviationPath deviation_of_trades(const InitialCondition& ic, const TradeList& trades, const PathBundle& bundle,
                                  const ParameterSchedule& schedule)
{
    const auto& g = *bundle.grid;
    const std::size_t n = g.size();
    std::vector<double> net(n, 0.0);
    for (const auto& tr : trades) {
        if (!(tr.time >= 0.0 && tr.time <= g.horizon())) {
            std::ostringstream os;
            os << "trade at t=" << tr.time << " outside [0, " << g.horizon() << "]";
            throw Error(ErrorCode::TradeOutsideHorizon, os.str());
        }
        const auto k = g.find(tr.time);
        if (!k)
            throw Error(ErrorCode::InvalidArgument, "trade time is not a grid point");
        net[*k] += tr.delta_x;
    }
    const auto decay = step_decay(schedule, g);

    DeviationPath out;
    out.d_at_0minus = ic.d;
    out.grid = bundle.grid;
    out.values.resize(n);
    out.left_limits.resize(n);
    double dev = ic.d;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0)
            dev *= decay[k - 1];
        out.left_limits[k] = dev;
        dev += bundle.gamma[k] * net[k];
        out.values[k] = dev;
    }
    return out;
}

PathEngine::PathEngine(Model model, double steps_per_unit) : model_(std::move(model)), density_(steps_per_unit)
{
    validate_initial_condition(model_.ic);
    if (!(density_ > 0.0))
        throw Error(ErrorCode::InvalidArgument, "grid density must be positive");
    if (model_.chain) {
        surface_ = solve_regime_Y(*model_.chain, model_.horizon, density_);
        return;
    }
    if (!model_.schedule)
        throw Error(ErrorCode::InvalidArgument, "model has neither a schedule nor a regime chain");
    schedule_ = std::make_shared<const ParameterSchedule>(*model_.schedule);
    grid_ = std::make_shared<const TimeGrid>(make_grid(*schedule_, density_));
    value_ = std::make_shared<const ValuePath>(solve_Y_backward(*schedule_, grid_));
    beta_ = std::make_shared<const BetaPath>(beta_from_Y(*schedule_, *value_));
    decay_ = std::make_shared<const std::vector<double>>(step_decay(*schedule_, *grid_));
}

PathRealization PathEngine::realize(std::uint64_t seed, std::uint64_t path_index) const
{
    PathRealization r;
    if (surface_) {
        r.regime = sample_regime_path(*model_.chain, model_.horizon, seed, path_index);
        r.schedule = std::make_shared<const ParameterSchedule>(schedule_along(*model_.chain, *r.regime, model_.horizon));
        r.grid = std::make_shared<const TimeGrid>(make_grid(*r.schedule, density_));
        r.value = std::make_shared<const ValuePath>(value_along(*surface_, *r.regime, r.grid));
        r.beta = std::make_shared<const BetaPath>(beta_from_Y(*r.schedule, *r.value));
        r.decay = std::make_shared<const std::vector<double>>(step_decay(*r.schedule, *r.grid));
    } else {
        r.schedule = schedule_;
        r.grid = grid_;
        r.value = value_;
        r.beta = beta_;
        r.decay = decay_;
    }
    r.bundle = exponential_Q(*r.beta, *r.schedule, sample_gamma(*r.schedule, r.grid, model_.ic.gamma0, seed, path_index));
    r.optimal = optimal_strategy_path(model_.ic, *r.beta, r.bundle);
    return r;
}

} // namespace negres
