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

// Shared fixtures for the unit tests and the acceptance suite.

#pragma once

#include "negres/model.hpp"
#include "negres/scenario.hpp"
#include "negres/simulate.hpp"
#include "negres/value_ode.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace negres::testing {

/// Three segments on [0,1), [1,2), [2,3] with ρ = (0.1, rho2, 1) and μ = 0.5.
inline ParameterSchedule three_regime(double rho2, double sigma = 0.0)
{
    return build_schedule({{0.0, 1.0, 0.1, 0.5, sigma, std::nullopt},
                           {1.0, 2.0, rho2, 0.5, sigma, std::nullopt},
                           {2.0, 3.0, 1.0, 0.5, sigma, std::nullopt}},
                          3.0);
}

inline ParameterSchedule constant(double rho, double mu, double sigma, double horizon)
{
    return build_schedule({{0.0, horizon, rho, mu, sigma, std::nullopt}}, horizon);
}

inline Model model_of(const ParameterSchedule& schedule, InitialCondition ic = {})
{
    Model m;
    m.horizon = schedule.horizon();
    m.ic = ic;
    m.schedule = schedule;
    return m;
}

inline ParameterSchedule registered_schedule(const char* id, double grid = 4000.0)
{
    auto file = registered_scenario(id);
    file.run.grid = grid;
    return *resolve(file).model.schedule;
}

/// Random piecewise-constant schedule on [0, T]. ρ in [rho_lo, rho_hi],
/// μ in [0.2, 2], σ² below the convexity margin.
struct RandomScheduleSpec {
    double rho_lo = 0.05;
    double rho_hi = 1.5;
    bool noisy = false;
    /// When set, the final segment gets ρ in [final_lo, final_hi].
    bool negative_final = false;
    double final_lo = -0.3;
    double final_hi = -0.02;
};

inline ParameterSchedule random_schedule(std::mt19937_64& rng, const RandomScheduleSpec& spec)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 1 + static_cast<int>(u(rng) * 4.0);
    const double horizon = 0.5 + 2.5 * u(rng);
    std::vector<double> cuts{0.0};
    for (int i = 1; i < n; ++i)
        cuts.push_back(horizon * u(rng));
    cuts.push_back(horizon);
    std::sort(cuts.begin(), cuts.end());
    std::vector<ParameterSegment> segs;
    for (int i = 0; i < n; ++i) {
        if (cuts[i + 1] - cuts[i] < 0.05)
            continue;
        segs.push_back({cuts[i], cuts[i + 1], 0, 0, 0, std::nullopt});
    }
    if (segs.empty())
        segs.push_back({0.0, horizon, 0, 0, 0, std::nullopt});
    segs.front().start = 0.0;
    segs.back().end = horizon;
    for (std::size_t i = 1; i < segs.size(); ++i)
        segs[i].start = segs[i - 1].end;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        auto& s = segs[i];
        const bool last = i + 1 == segs.size();
        const double lo = spec.negative_final && last ? spec.final_lo : spec.rho_lo;
        const double hi = spec.negative_final && last ? spec.final_hi : spec.rho_hi;
        s.rho = lo + (hi - lo) * u(rng);
        s.mu = 0.2 + 1.8 * u(rng);
        if (2.0 * s.rho + s.mu < 0.05)
            s.mu = 0.05 - 2.0 * s.rho + 0.5 * u(rng);
        const double margin = 2.0 * s.rho + s.mu;
        s.sigma = spec.noisy ? std::sqrt(0.8 * margin * u(rng)) : 0.0;
    }
    return build_schedule(std::move(segs), horizon);
}

} // namespace negres::testing
