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
#include "negres/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace negres;
using negres::testing::model_of;
using negres::testing::three_regime;

namespace {

double exact_cost(const PathEngine& engine, StrategyKind kind)
{
    return expected_cost(engine, {kind, {}, 0.0}, {1, 0, 1}).mean;
}

} // namespace

TEST_CASE("single block at time zero")
{
    const auto s = negres::testing::constant(1.0, 0.5, 0.0, 1.0);
    const PathEngine engine(model_of(s), 100.0);
    const auto r = engine.realize(0, 0);
    CHECK(cost_of_trades({{0.0, -1.0}}, r.bundle, s, {1.0, 0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
    const auto c = cost_components({{0.0, -1.0}}, r.bundle, s, {1.0, 0.0, 1.0});
    CHECK(c.deviation == 0.0);
    CHECK(c.quadratic == 0.5);
}

TEST_CASE("two equal blocks against the hand recursion")
{
    const auto s = negres::testing::constant(1.0, 0.0, 0.0, 1.0);
    const PathEngine engine(model_of(s), 10.0);
    const auto r = engine.realize(0, 0);
    const double cost = cost_of_trades({{0.0, -0.5}, {1.0, -0.5}}, r.bundle, s, {1.0, 0.0, 1.0});
    CHECK(std::abs(cost - (0.25 + 0.25 * std::exp(-1.0))) <= 1e-10);
    CHECK(exact_cost(engine, StrategyKind::TwoBlocks) == doctest::Approx(0.25 + 0.25 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("trades that do not close the position are rejected")
{
    const auto s = negres::testing::constant(1.0, 0.0, 0.0, 1.0);
    const PathEngine engine(model_of(s), 10.0);
    const auto r = engine.realize(0, 0);
    CHECK_THROWS_AS(cost_of_trades({{0.0, -0.5}}, r.bundle, s, {1.0, 0.0, 1.0}), Error);
}

TEST_CASE("discretization of strategies")
{
    const auto s = three_regime(-0.05);
    const PathEngine engine(model_of(s), 4000.0);
    const auto r = engine.realize(0, 0);

    StrategyPath hold;
    hold.x_at_0minus = 1.0;
    hold.grid = r.grid;
    hold.values.assign(r.grid->size(), 1.0);
    hold.values.back() = 0.0;
    hold.left_limits.assign(r.grid->size(), 1.0);
    const auto block = discretize_strategy(hold);
    REQUIRE(block.size() == 1);
    CHECK(block[0].time == 3.0);
    CHECK(block[0].delta_x == -1.0);

    const auto trades = discretize_strategy(r.optimal.strategy);
    double net = 0.0;
    for (const auto& t : trades)
        net += t.delta_x;
    CHECK(std::abs(net + 1.0) <= 1e-12);
    for (std::size_t i = 1; i < trades.size(); ++i)
        CHECK(trades[i].time >= trades[i - 1].time);
}

TEST_CASE("the optimum beats a single block on S1")
{
    const PathEngine engine(model_of(three_regime(-0.05)), 4000.0);
    CHECK(exact_cost(engine, StrategyKind::Optimal) < exact_cost(engine, StrategyKind::BlockAtStart));
    CHECK(exact_cost(engine, StrategyKind::BlockAtStart) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("refinement changes the S1 cost by less than 1e-3")
{
    const double a = exact_cost(PathEngine(model_of(three_regime(-0.05)), 1000.0), StrategyKind::Optimal);
    const double b = exact_cost(PathEngine(model_of(three_regime(-0.05)), 2000.0), StrategyKind::Optimal);
    CHECK(std::abs(a - b) <= 1e-3);
}

TEST_CASE("deterministic models are evaluated once")
{
    const PathEngine engine(model_of(three_regime(-0.05)), 500.0);
    const auto rep = expected_cost(engine, {StrategyKind::Optimal, {}, 0.0}, {5000, 42, 0});
    CHECK(rep.n_paths == 1);
    CHECK(rep.std_error == 0.0);
    CHECK(rep.strategy == "optimal");
}

TEST_CASE("optimal cost scales quadratically in the position")
{
    for (double rho2 : {-0.05, -0.09, -0.15}) {
        const auto s = three_regime(rho2);
        const double base = exact_cost(PathEngine(model_of(s, {1.0, 0.0, 1.0}), 1000.0), StrategyKind::Optimal);
        const double scaled = exact_cost(PathEngine(model_of(s, {2.5, 0.0, 1.0}), 1000.0), StrategyKind::Optimal);
        CHECK(std::abs(scaled - 6.25 * base) <= 1e-10 * std::abs(6.25 * base));
    }
}

TEST_CASE("stochastic costs are seed-consistent and beat TWAP")
{
    const PathEngine engine(model_of(three_regime(-0.05, std::sqrt(0.1))), 250.0);
    const auto a = expected_cost(engine, {StrategyKind::Optimal, {}, 0.0}, {4000, 42, 0});
    const auto b = expected_cost(engine, {StrategyKind::Optimal, {}, 0.0}, {4000, 4242, 0});
    CHECK(a.std_error > 0.0);
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
    const auto twap = expected_cost(engine, {StrategyKind::Twap, {}, 0.0}, {4000, 42, 0});
    CHECK(a.mean <= twap.mean - 3.0 * twap.std_error);
}

TEST_CASE("results do not depend on the worker count")
{
    const PathEngine engine(model_of(three_regime(-0.07, std::sqrt(0.1))), 100.0);
    std::vector<StrategySpec> specs{{StrategyKind::Optimal, {}, 0.0}, {StrategyKind::Twap, {}, 0.0}};
    const auto one = expected_costs(engine, specs, {777, 9, 1});
    const auto three = expected_costs(engine, specs, {777, 9, 3});
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK(one[i].mean == three[i].mean);
        CHECK(one[i].std_error == three[i].std_error);
        CHECK(one[i].components.deviation == three[i].components.deviation);
    }
}

TEST_CASE("baselines never beat the optimum on registered scenarios")
{
    for (const char* id : {"S1", "S2", "S3", "S4", "S5", "S6", "S7", "R1", "R2"}) {
        auto file = registered_scenario(id);
        file.run.grid = 200.0;
        const auto r = resolve(file);
        const PathEngine engine(r.model, 200.0);
        std::vector<StrategySpec> specs{{StrategyKind::Optimal, {}, 0.0}};
        for (auto k : kBaselines)
            specs.push_back({k, {}, 0.0});
        const auto reps = expected_costs(engine, specs, {1000, 42, 0});
        for (std::size_t i = 1; i < reps.size(); ++i) {
            INFO(id << " " << reps[i].strategy);
            CHECK(reps[0].mean <= reps[i].mean + 3.0 * reps[i].std_error);
        }
    }
}

TEST_CASE("perturbations of the optimum")
{
    const PathEngine s3(model_of(three_regime(-0.15)), 1000.0);
    const std::vector<TradeList> dirs{{{0.5, 0.1}, {1.5, -0.1}}, {{0.0, -0.2}, {2.5, 0.2}}, {{1.0, 0.3}, {3.0, -0.3}}};
    const std::vector<double> eps{-0.01, 0.01};
    const auto rep = perturbation_test(s3, dirs, eps, {1, 0, 0});
    REQUIRE(rep.directions.size() == 3);
    for (const auto& d : rep.directions) {
        CHECK(d.second_difference >= -1e-10);
        CHECK(std::abs(d.first_derivative) <= 1e-3 * rep.base_cost);
    }

    const std::vector<TradeList> zero{{}};
    const auto z = perturbation_test(s3, zero, eps, {1, 0, 0});
    CHECK(z.directions[0].costs[0] == z.base_cost);
    CHECK(z.directions[0].costs[1] == z.base_cost);

    const std::vector<TradeList> not_round_trip{{{0.5, 0.1}}};
    CHECK_THROWS_AS(perturbation_test(s3, not_round_trip, eps, {1, 0, 0}), Error);
}

TEST_CASE("first-order stationarity sharpens with the grid")
{
    const std::vector<TradeList> dir{{{0.5, 1.0}, {1.5, -1.0}}};
    const std::vector<double> eps{-0.01, 0.01};
    const auto coarse = perturbation_test(PathEngine(model_of(three_regime(-0.05)), 1000.0), dir, eps, {1, 0, 0});
    const auto fine = perturbation_test(PathEngine(model_of(three_regime(-0.05)), 8000.0), dir, eps, {1, 0, 0});
    const double dc = std::abs(coarse.directions[0].first_derivative);
    const double df = std::abs(fine.directions[0].first_derivative);
    CHECK(df < dc / 4.0);
}

TEST_CASE("pairwise summation")
{
    std::vector<double> v(1'000'001, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100000.1).epsilon(1e-13));
    CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
    std::vector<double> one{3.5};
    CHECK(pairwise_sum(one) == 3.5);
}

TEST_CASE("strategy ids")
{
    CHECK(std::string(strategy_id(StrategyKind::Optimal)) == "optimal");
    CHECK(std::string(strategy_id(StrategyKind::BlockAtStart)) == "block_at_0");
    CHECK(std::string(strategy_id(StrategyKind::BlockAtEnd)) == "block_at_T");
    CHECK(std::string(strategy_id(StrategyKind::Twap)) == "twap");
    CHECK(std::string(strategy_id(StrategyKind::TwoBlocks)) == "two_blocks");
}
