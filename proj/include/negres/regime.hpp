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

#include <cstdint>
#include <memory>
#include <vector>

namespace negres {

/// Y^i(t) for every chain state on a uniform grid over [0, T].
struct RegimeValueSurface {
    std::vector<double> times;
    std::size_t n_states = 0;
    /// Row-major (time, state).
    std::vector<double> values;
    /// dY^i/dt of the coupled system at each node, used for Hermite interpolation.
    std::vector<double> slopes;

    double at(std::size_t k, std::size_t state) const { return values[k * n_states + state]; }
    double horizon() const { return times.back(); }
    /// Cubic Hermite interpolation of state `state` at time t ∈ [0, T].
    double interpolate(double t, std::size_t state) const;
};

/// Backward RK4 on dY^i/dt = f_i(Y^i) − Σ_j q_ij (Y^j − Y^i), Y^i_T = 1/2.
RegimeValueSurface solve_regime_Y(const RegimeChain& chain, double horizon, double steps_per_unit);

/// A realized regime path: state[0] holds on [0, jump_times[0]), state[j] on
/// [jump_times[j−1], jump_times[j]), the last one up to T.
struct RegimePath {
    std::vector<double> jump_times;
    std::vector<std::size_t> states;
};

/// Exact sampling with exponential holding times from a Philox substream
/// tagged StreamPurpose::Regime, independent of the Brownian stream.
RegimePath sample_regime_path(const RegimeChain& chain, double horizon, std::uint64_t seed,
                              std::uint64_t path_index = 0);

/// The piecewise-constant schedule realized along a regime path.
ParameterSchedule schedule_along(const RegimeChain& chain, const RegimePath& path, double horizon);

/// Y_t = y(t, state_t) on `grid`, which must be make_grid(schedule_along(...)).
/// Left limits at switch times use the pre-switch state.
ValuePath value_along(const RegimeValueSurface& surface, const RegimePath& path,
                      std::shared_ptr<const TimeGrid> grid);

struct RegimeBoundsReport {
    bool ok = true;
    bool terminal_ok = true;
    /// Largest distance outside [0, 1/2]; zero when within bounds.
    double worst_violation = 0.0;
    double worst_time = 0.0;
    std::size_t worst_state = 0;
};

RegimeBoundsReport check_regime_bounds(const RegimeValueSurface& surface, double tol = kValueBoundTol);

} // namespace negres
