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

#include "negres/regime.hpp"

#include "negres/error.hpp"
#include "negres/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace negres {

namespace {

void coupled_rhs(const RegimeChain& chain, const std::vector<double>& y, std::vector<double>& dy)
{
    const std::size_t n = chain.size();
    for (std::size_t i = 0; i < n; ++i) {
        double coupling = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i)
                coupling += chain.rate(i, j) * (y[j] - y[i]);
        }
        dy[i] = value_driver(chain.states[i], y[i]) - coupling;
    }
}

} // namespace

double RegimeValueSurface::interpolate(double t, std::size_t state) const
{
    if (!(t >= times.front() && t <= times.back()))
        throw Error(ErrorCode::OutOfRange, "surface interpolation outside [0, T]");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
    if (k + 1 >= times.size())
        return at(times.size() - 1, state);
    const double h = times[k + 1] - times[k];
    const double s = (t - times[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double y0 = at(k, state);
    const double y1 = at(k + 1, state);
    const double d0 = slopes[k * n_states + state];
    const double d1 = slopes[(k + 1) * n_states + state];
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

RegimeValueSurface solve_regime_Y(const RegimeChain& chain, double horizon, double steps_per_unit)
{
    validate_chain(chain);
    if (!(horizon > 0.0) || !(steps_per_unit > 0.0))
        throw Error(ErrorCode::InvalidArgument, "horizon and grid density must be positive");

    const std::size_t n = chain.size();
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon * steps_per_unit - 1e-9)));
    const double h = horizon / static_cast<double>(steps);

    RegimeValueSurface out;
    out.n_states = n;
    out.times.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        out.times[k] = k == steps ? horizon : h * static_cast<double>(k);
    out.values.assign((steps + 1) * n, 0.0);
    out.slopes.assign((steps + 1) * n, 0.0);

    std::vector<double> y(n, 0.5), k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto store = [&](std::size_t k) {
        std::copy(y.begin(), y.end(), out.values.begin() + static_cast<std::ptrdiff_t>(k * n));
        coupled_rhs(chain, y, tmp);
        std::copy(tmp.begin(), tmp.end(), out.slopes.begin() + static_cast<std::ptrdiff_t>(k * n));
    };
    store(steps);
    for (std::size_t k = steps; k-- > 0;) {
        coupled_rhs(chain, y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - 0.5 * h * k1[i];
        coupled_rhs(chain, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - 0.5 * h * k2[i];
        coupled_rhs(chain, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - h * k3[i];
        coupled_rhs(chain, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(y[i] >= -kValueBoundTol && y[i] <= 0.5 + kValueBoundTol)) {
                std::ostringstream os;
                os << "Y^" << i << "=" << y[i] << " left [0, 1/2] at t=" << out.times[k];
                throw Error(ErrorCode::StepFailure, os.str());
            }
        }
        store(k);
    }
    return out;
}

RegimePath sample_regime_path(const RegimeChain& chain, double horizon, std::uint64_t seed, std::uint64_t path_index)
{
    validate_chain(chain);
    RandomStream rng(seed, path_index, StreamPurpose::Regime);
    RegimePath path;
    std::size_t state = chain.initial_state;
    path.states.push_back(state);
    double t = 0.0;
    for (;;) {
        const double rate = chain.exit_rate(state);
        if (!(rate > 0.0))
            break;
        t += rng.exponential(rate);
        if (t >= horizon)
            break;
        // Next state with probability q_ij / q_i.
        double u = rng.uniform() * rate;
        std::size_t next = state;
        for (std::size_t j = 0; j < chain.size(); ++j) {
            if (j == state || !(chain.rate(state, j) > 0.0))
                continue;
            next = j;
            u -= chain.rate(state, j);
            if (u <= 0.0)
                break;
        }
        path.jump_times.push_back(t);
        path.states.push_back(next);
        state = next;
    }
    return path;
}

ParameterSchedule schedule_along(const RegimeChain& chain, const RegimePath& path, double horizon)
{
    std::vector<ParameterSegment> segments;
    double start = 0.0;
    for (std::size_t j = 0; j < path.states.size(); ++j) {
        const double end = j < path.jump_times.size() ? path.jump_times[j] : horizon;
        const auto& p = chain.states.at(path.states[j]);
        segments.push_back({start, end, p.rho, p.mu, p.sigma, std::nullopt});
        start = end;
    }
    return build_schedule(std::move(segments), horizon);
}

ValuePath value_along(const RegimeValueSurface& surface, const RegimePath& path,
                      std::shared_ptr<const TimeGrid> grid)
{
    const auto& g = *grid;
    ValuePath out;
    out.grid = grid;
    out.values.resize(g.size());
    out.left_limits.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double t = g.times[k];
        const std::size_t state = path.states.at(g.segment[k]);
        out.values[k] = k + 1 == g.size() ? 0.5 : surface.interpolate(t, state);
        out.left_limits[k] = k > 0 && g.segment[k - 1] != g.segment[k]
                                 ? surface.interpolate(t, path.states.at(g.segment[k - 1]))
                                 : out.values[k];
    }
    return out;
}

RegimeBoundsReport check_regime_bounds(const RegimeValueSurface& surface, double tol)
{
    RegimeBoundsReport report;
    const std::size_t last = surface.times.size() - 1;
    for (std::size_t k = 0; k < surface.times.size(); ++k) {
        for (std::size_t i = 0; i < surface.n_states; ++i) {
            const double v = surface.at(k, i);
            const double excess = std::max(-v, v - 0.5);
            if (excess > report.worst_violation) {
                report.worst_violation = excess;
                report.worst_time = surface.times[k];
                report.worst_state = i;
            }
            if (k == last && v != 0.5)
                report.terminal_ok = false;
        }
    }
    report.ok = report.terminal_ok && report.worst_violation <= tol;
    return report;
}

} // namespace negres
