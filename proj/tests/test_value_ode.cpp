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
#include "negres/value_ode.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace negres;
using negres::testing::three_regime;

namespace {

// Independent fixed-step RK4 on the σ = 0 equation, written against the
// schedule only through eval_in.
double oracle_Y0(const ParameterSchedule& s, int steps_per_segment)
{
    double y = 0.5;
    for (std::size_t i = s.size(); i-- > 0;) {
        const auto& seg = s.segment(i);
        const double h = seg.length() / steps_per_segment;
        auto f = [&](double yy) {
            const double r = seg.rho, m = seg.mu;
            return (r + m) * (r + m) * yy * yy / (0.5 * (2 * r + m)) - m * yy;
        };
        for (int k = 0; k < steps_per_segment; ++k) {
            const double k1 = f(y), k2 = f(y - 0.5 * h * k1), k3 = f(y - 0.5 * h * k2), k4 = f(y - h * k3);
            y -= h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
    }
    return y;
}

double max_closed_form_gap(const ParameterSchedule& s, double density)
{
    const auto y = solve_Y_backward(s, density);
    double worst = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k)
        worst = std::max(worst, std::abs(closed_form_Y(s, y.time(k)) - y.values[k]));
    return worst;
}

} // namespace

TEST_CASE("closed form terminal value and constant solution")
{
    const auto s1 = three_regime(-0.05);
    CHECK(closed_form_Y(s1, 3.0) == 0.5);
    const auto zero = negres::testing::constant(0.0, 0.5, 0.0, 3.0);
    for (double t : {0.0, 0.7, 1.5, 2.99, 3.0})
        CHECK(closed_form_Y(zero, t) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("closed form agrees with an independent fine RK4")
{
    for (double rho2 : {-0.05, -0.09, -0.15}) {
        const auto s = three_regime(rho2);
        const double y0 = closed_form_Y(s, 0.0);
        CHECK(y0 > 0.0);
        CHECK(y0 < 0.5);
        CHECK(std::abs(y0 - oracle_Y0(s, 1'000'000 / 3)) <= 1e-8);
    }
}

TEST_CASE("closed form preconditions")
{
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    const auto noisy = three_regime(-0.05, 0.3);
    CHECK(code([&] { closed_form_Y(noisy, 0.0); }) == ErrorCode::PreconditionViolated);
    const auto varying_mu = build_schedule({{0.0, 1.0, 0.1, 0.5, 0.0, std::nullopt},
                                            {1.0, 2.0, 0.1, 0.7, 0.0, std::nullopt}},
                                           2.0);
    CHECK(code([&] { closed_form_Y(varying_mu, 0.0); }) == ErrorCode::PreconditionViolated);
    CHECK(code([&] { closed_form_Y(negres::testing::registered_schedule("S7"), 0.0); }) ==
          ErrorCode::PreconditionViolated);
    const auto s1 = three_regime(-0.05);
    CHECK(code([&] { closed_form_Y(s1, 3.5); }) == ErrorCode::OutOfRange);
}

TEST_CASE("numerical solution matches the closed form on S1 to S3")
{
    for (double rho2 : {-0.05, -0.09, -0.15})
        CHECK(max_closed_form_gap(three_regime(rho2), 4000.0) <= 1e-8);
}

TEST_CASE("zero resilience keeps Y at one half and beta at one")
{
    const auto s = negres::testing::constant(0.0, 0.5, 0.0, 3.0);
    const auto y = solve_Y_backward(s, 4000.0);
    for (double v : y.values)
        CHECK(std::abs(v - 0.5) <= 1e-12);
    const auto b = beta_from_Y(s, y);
    for (std::size_t k = 0; k < b.size(); ++k)
        CHECK(std::abs(b.values[k] - 1.0) <= 1e-12);
    CHECK(b.left_limits[0] == kBetaAt0Minus);
    CHECK(bsde_residual(s, y) <= 1e-12);
}

TEST_CASE("beta at T and the S2 jump above one")
{
    const auto s1 = three_regime(-0.05);
    const auto b1 = beta_from_Y(s1, solve_Y_backward(s1, 4000.0));
    CHECK(b1.values.back() == doctest::Approx(0.6).epsilon(1e-14));

    const auto s2 = three_regime(-0.09);
    const auto y2 = solve_Y_backward(s2, 4000.0);
    const auto b2 = beta_from_Y(s2, y2);
    const auto k = *y2.grid->find(1.0);
    const double expected = (-0.09 + 0.5) / (-0.09 + 0.25) * y2.values[k];
    CHECK(b2.values[k] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(b2.values[k] > 1.0);
    CHECK(b2.left_limits[k] < 1.0);
}

TEST_CASE("bsde residual is small and converges")
{
    const auto s = three_regime(-0.05);
    const auto coarse = bsde_residual(s, solve_Y_backward(s, 4000.0));
    const auto fine = bsde_residual(s, solve_Y_backward(s, 40000.0));
    CHECK(coarse <= 1e-5);
    // Central differences are second order: ten times finer, roughly 100 times smaller.
    CHECK(fine <= coarse / 50.0);
}

TEST_CASE("bsde residual detects a corrupted point")
{
    const auto s = three_regime(-0.05);
    auto y = solve_Y_backward(s, 4000.0);
    const double h = y.time(1) - y.time(0);
    const std::size_t k = 1234;
    y.values[k] += 0.01;
    y.left_limits[k] += 0.01;
    // A central difference spreads the spike over 2h.
    CHECK(bsde_residual(s, y) > 0.01 / (2.0 * h) * 0.99);
}

TEST_CASE("closure scenario keeps Y on the closure curve")
{
    const auto s7 = negres::testing::registered_schedule("S7");
    const auto y = solve_Y_backward(s7, 4000.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = y.time(k);
        if (t <= 1.0 || t >= 2.0)
            continue;
        const double r = s7.eval(t).rho;
        worst = std::max(worst, std::abs(y.values[k] - (r + 1.0) / (r + 2.0)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("driver rejects a non-positive denominator")
{
    CHECK_THROWS_AS(value_driver({-0.3, 0.5, 0.0}, 0.0), Error);
    CHECK(value_driver({0.0, 0.5, 0.0}, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("randomized schedules respect bounds and the pointwise beta bound")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto s = negres::testing::random_schedule(rng, {-0.2, 1.2, trial % 2 == 0});
        const auto y = solve_Y_backward(s, 500.0);
        CHECK(y.values.back() == 0.5);
        for (double v : y.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 0.5 + kValueBoundTol);
        }
        for (std::size_t k = 0; k < y.size(); ++k)
            CHECK(y.left_limits[k] == y.values[k]);
        const auto b = beta_from_Y(s, y);
        for (std::size_t k = 0; k < b.size(); ++k) {
            const auto p = s.eval_in(y.grid->segment[k], y.time(k));
            if (p.rho >= 0.0) {
                const double bound = (p.rho + p.mu > 0.0) ? 1.0 - p.rho / (2.0 * p.rho + p.mu) : 0.0;
                CHECK(b.values[k] <= bound + 1e-10);
            }
        }
        // β jumps exactly where ρ jumps.
        for (std::size_t k = 1; k + 1 < b.size(); ++k) {
            const bool beta_jumps = std::abs(b.left_limits[k] - b.values[k]) > 1e-12;
            const bool rho_jumps = y.grid->is_boundary(k) && s.left_limit(y.time(k)).rho != s.eval(y.time(k)).rho;
            CHECK(beta_jumps == rho_jumps);
        }
    }
}

TEST_CASE("grid resolution reported by the value path")
{
    const auto s = three_regime(-0.05);
    const auto y = solve_Y_backward(s, 100.0);
    CHECK(y.size() == 301);
    CHECK(y.grid->times[100] == 1.0);
}
