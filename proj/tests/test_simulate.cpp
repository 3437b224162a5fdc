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

#include "negres/cost.hpp"
#include "negres/error.hpp"
#include "negres/simulate.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace negres;
using negres::testing::three_regime;

TEST_CASE("noise-free depth is deterministic exponential growth")
{
    const auto s = three_regime(-0.05);
    auto grid = std::make_shared<const TimeGrid>(make_grid(s, 100.0));
    const auto a = sample_gamma(s, grid, 2.0, 1, 0);
    const auto b = sample_gamma(s, grid, 2.0, 99, 5);
    CHECK(a.gamma == b.gamma);
    for (double w : a.dW)
        CHECK(w == 0.0);
    CHECK(a.gamma.back() == doctest::Approx(2.0 * std::exp(0.5 * 3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(sample_gamma(s, grid, 0.0, 1, 0), Error);
}

TEST_CASE("discounted depth is a martingale")
{
    const auto s = negres::testing::constant(0.2, 0.5, std::sqrt(0.1), 3.0);
    auto grid = std::make_shared<const TimeGrid>(make_grid(s, 20.0));
    const int n = 40000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = sample_gamma(s, grid, 1.0, 42, i).gamma.back() * std::exp(-0.5 * 3.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 4.0 * se);
    // Exact second moment of a lognormal: exp(σ²T).
    CHECK(sum2 / n == doctest::Approx(std::exp(0.1 * 3.0)).epsilon(0.03));
}

TEST_CASE("log of the stochastic exponential has the compensator as its mean")
{
    const auto s = three_regime(-0.05, std::sqrt(0.1));
    auto grid = std::make_shared<const TimeGrid>(make_grid(s, 200.0));
    const auto y = solve_Y_backward(s, grid);
    const auto beta = beta_from_Y(s, y);
    // Deterministic part with the same trapezoid rule.
    double drift = 0.0;
    for (std::size_t k = 0; k + 1 < grid->size(); ++k) {
        const auto p = s.eval_in(grid->segment[k], grid->times[k]);
        const double h = grid->times[k + 1] - grid->times[k];
        auto r = [&](double b) { return b * (p.mu + p.rho - p.sigma * p.sigma) + 0.5 * b * b * p.sigma * p.sigma; };
        drift += 0.5 * h * (r(beta.values[k]) + r(beta.left_limits[k + 1]));
    }
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto b = exponential_Q(beta, s, sample_gamma(s, grid, 1.0, 7, i));
        const double v = std::log(b.expQ.back());
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean + drift) <= 4.0 * se);
    // Variance of −∫βσ dW is ∫β²σ² ds.
    double qv = 0.0;
    for (std::size_t k = 0; k + 1 < grid->size(); ++k)
        qv += beta.values[k] * beta.values[k] * 0.1 * (grid->times[k + 1] - grid->times[k]);
    CHECK(sum2 / n - mean * mean == doctest::Approx(qv).epsilon(0.05));
}

TEST_CASE("optimal pair boundary conditions")
{
    const auto s = three_regime(-0.09);
    const PathEngine engine(negres::testing::model_of(s, {1.0, 0.0, 1.0}), 1000.0);
    const auto r = engine.realize(42, 0);
    const auto& x = r.optimal.strategy;
    const auto& d = r.optimal.deviation;
    CHECK(x.x_at_0minus == 1.0);
    CHECK(x.left_limits.front() == 1.0);
    CHECK(d.left_limits.front() == 0.0);
    CHECK(x.values.back() == 0.0);
    // X*_0 = c(1 − β_0) and D*_0 = −cγ₀β_0.
    CHECK(x.values.front() == doctest::Approx(1.0 - r.beta->values.front()));
    CHECK(d.values.front() == doctest::Approx(-r.beta->values.front()));
    CHECK(d.values.back() == doctest::Approx(-r.bundle.gamma.back() * r.bundle.expQ.back()));
    REQUIRE_FALSE(x.jumps.empty());
    CHECK(x.jumps.front().time == 0.0);
    CHECK(x.jumps.back().time == 3.0);
    CHECK(x.jumps.back().right == 0.0);
    // Jumps at both interior boundaries.
    int interior = 0;
    for (const auto& j : x.jumps)
        interior += j.time == 1.0 || j.time == 2.0;
    CHECK(interior == 2);
}

TEST_CASE("optimal pair scales with the prefactor")
{
    const auto s = three_regime(-0.05);
    const PathEngine one(negres::testing::model_of(s, {1.0, 0.0, 1.0}), 500.0);
    const PathEngine scaled(negres::testing::model_of(s, {3.0, 0.5, 2.0}), 500.0);
    const auto a = one.realize(1, 0);
    const auto b = scaled.realize(1, 0);
    const double c = 3.0 - 0.5 / 2.0;
    for (std::size_t k = 1; k + 1 < a.grid->size(); k += 17) {
        CHECK(b.optimal.strategy.values[k] == doctest::Approx(c * a.optimal.strategy.values[k]).epsilon(1e-12));
        // γ scales with γ₀ as well.
        CHECK(b.optimal.deviation.values[k] ==
              doctest::Approx(2.0 * c * a.optimal.deviation.values[k]).epsilon(1e-12));
    }
}

TEST_CASE("deviation of the discretized optimum tracks the optimal deviation")
{
    const auto s = three_regime(-0.05);
    const PathEngine engine(negres::testing::model_of(s), 4000.0);
    const auto r = engine.realize(0, 0);
    const auto trades = discretize_strategy(r.optimal.strategy);
    const auto dev = deviation_of_trades(engine.model().ic, trades, r.bundle, *r.schedule);
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < dev.values.size(); ++k)
        worst = std::max(worst, std::abs(dev.values[k] - r.optimal.deviation.values[k]));
    CHECK(worst < 1e-3);
    CHECK(dev.values.back() == doctest::Approx(r.optimal.deviation.values.back()).epsilon(1e-3));
}

TEST_CASE("hand recursion for a two-block deviation")
{
    const auto s = negres::testing::constant(1.0, 0.0, 0.0, 1.0);
    auto grid = std::make_shared<const TimeGrid>(make_grid(s, 10.0));
    const auto bundle = sample_gamma(s, grid, 1.0, 0, 0);
    const TradeList trades{{0.0, -0.5}, {1.0, -0.5}};
    const auto d = deviation_of_trades({1.0, 0.0, 1.0}, trades, bundle, s);
    CHECK(d.values.front() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(d.left_limits.back() == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(d.values.back() == doctest::Approx(-0.5 * std::exp(-1.0) - 0.5).epsilon(1e-14));
}

TEST_CASE("trades must lie on the grid inside the horizon")
{
    const auto s = negres::testing::constant(1.0, 0.0, 0.0, 1.0);
    auto grid = std::make_shared<const TimeGrid>(make_grid(s, 10.0));
    const auto bundle = sample_gamma(s, grid, 1.0, 0, 0);
    auto code = [&](TradeList t) {
        try {
            deviation_of_trades({}, t, bundle, s);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    CHECK(code({{1.5, -1.0}}) == ErrorCode::TradeOutsideHorizon);
    CHECK(code({{-0.1, -1.0}}) == ErrorCode::TradeOutsideHorizon);
    CHECK(code({{0.55, -1.0}}) == ErrorCode::InvalidArgument);
}

TEST_CASE("realizations are reproducible per seed and path")
{
    const auto s = three_regime(-0.05, std::sqrt(0.1));
    const PathEngine engine(negres::testing::model_of(s), 200.0);
    const auto a = engine.realize(42, 3);
    const auto b = engine.realize(42, 3);
    const auto c = engine.realize(43, 3);
    CHECK(a.bundle.dW == b.bundle.dW);
    CHECK(a.optimal.strategy.values == b.optimal.strategy.values);
    CHECK(a.bundle.dW != c.bundle.dW);
    // β does not depend on the noise.
    CHECK(a.beta->values == c.beta->values);
}

TEST_CASE("deterministic model detection")
{
    CHECK(negres::testing::model_of(three_regime(-0.05)).deterministic());
    CHECK_FALSE(negres::testing::model_of(three_regime(-0.05, 0.1)).deterministic());
    const auto r1 = resolve(registered_scenario("R1"));
    CHECK_FALSE(r1.model.deterministic());
}

TEST_CASE("chain realizations carry their regime path")
{
    const auto r = resolve(registered_scenario("R1"));
    const PathEngine engine(r.model, 500.0);
    REQUIRE(engine.surface());
    const auto p = engine.realize(42, 0);
    REQUIRE(p.regime);
    CHECK(p.schedule->size() == p.regime->states.size());
    CHECK(p.value->values.back() == 0.5);
    CHECK(p.optimal.strategy.values.back() == 0.0);
}
