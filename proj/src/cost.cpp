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

#include <algorithm>
#include <cmath>
#include <thread>

namespace negres {

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

TradeList discretize_strategy(const StrategyPath& x)
{
    TradeList out;
    const auto& times = x.grid->times;
    double prev = x.x_at_0minus;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double next = k + 1 == times.size() ? 0.0 : x.values[k];
        const double delta = next - prev;
        if (delta != 0.0)
            out.push_back({times[k], delta});
        prev = next;
    }
    return out;
}

namespace {

struct IndexedTrade {
    std::size_t index;
    double delta_x;
};

std::vector<IndexedTrade> index_trades(const TradeList& trades, const TimeGrid& grid)
{
    std::vector<IndexedTrade> out;
    out.reserve(trades.size());
    for (const auto& tr : trades) {
        if (!(tr.time >= 0.0 && tr.time <= grid.horizon()))
            throw Error(ErrorCode::TradeOutsideHorizon, "trade time outside [0, T]");
        const auto k = grid.find(tr.time);
        if (!k)
            throw Error(ErrorCode::InvalidArgument, "trade time is not a grid point");
        out.push_back({*k, tr.delta_x});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return out;
}

void check_closes(const TradeList& trades, double x)
{
    double net = 0.0;
    for (const auto& tr : trades)
        net += tr.delta_x;
    if (std::abs(net + x) > 1e-9 * std::max(1.0, std::abs(x)))
        throw Error(ErrorCode::InvalidArgument, "trades do not close the position");
}

CostComponents sweep(const std::vector<IndexedTrade>& trades, const PathBundle& bundle,
                     std::span<const double> decay, double d0)
{
    CostComponents c;
    double dev = d0;
    std::size_t at = 0;
    for (const auto& tr : trades) {
        for (; at < tr.index; ++at)
            dev *= decay[at];
        const double gamma = bundle.gamma[tr.index];
        c.deviation += dev * tr.delta_x;
        c.quadratic += 0.5 * gamma * tr.delta_x * tr.delta_x;
        dev += gamma * tr.delta_x;
    }
    return c;
}

CostComponents price(const TradeList& trades, const PathRealization& path, const InitialCondition& ic)
{
    check_closes(trades, ic.x);
    return sweep(index_trades(trades, *path.grid), path.bundle, *path.decay, ic.d);
}

} // namespace

CostComponents cost_components(const TradeList& trades, const PathBundle& bundle, const ParameterSchedule& schedule,
                               const InitialCondition& ic)
{
    check_closes(trades, ic.x);
    const auto decay = step_decay(schedule, *bundle.grid);
    return sweep(index_trades(trades, *bundle.grid), bundle, decay, ic.d);
}

double cost_of_trades(const TradeList& trades, const PathBundle& bundle, const ParameterSchedule& schedule,
                      const InitialCondition& ic)
{
    return cost_components(trades, bundle, schedule, ic).total();
}

const char* strategy_id(StrategyKind kind) noexcept
{
    switch (kind) {
    case StrategyKind::Optimal: return "optimal";
    case StrategyKind::BlockAtStart: return "block_at_0";
    case StrategyKind::BlockAtEnd: return "block_at_T";
    case StrategyKind::Twap: return "twap";
    case StrategyKind::TwoBlocks: return "two_blocks";
    }
    return "unknown";
}

TradeList strategy_trades(StrategyKind kind, const PathRealization& path, const InitialCondition& ic)
{
    const double horizon = path.grid->horizon();
    switch (kind) {
    case StrategyKind::Optimal:
        return discretize_strategy(path.optimal.strategy);
    case StrategyKind::BlockAtStart:
        return {{0.0, -ic.x}};
    case StrategyKind::BlockAtEnd:
        return {{horizon, -ic.x}};
    case StrategyKind::TwoBlocks:
        return {{0.0, -0.5 * ic.x}, {horizon, -0.5 * ic.x}};
    case StrategyKind::Twap: {
        const auto& times = path.grid->times;
        const double slice = -ic.x / static_cast<double>(times.size());
        TradeList out;
        out.reserve(times.size());
        for (double t : times)
            out.push_back({t, slice});
        return out;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown strategy");
}

std::vector<CostReport> expected_costs(const PathEngine& engine, std::span<const StrategySpec> strategies,
                                       const CostConfig& config)
{
    const auto& model = engine.model();
    const std::size_t n_paths = model.deterministic() ? 1 : std::max<std::size_t>(config.n_paths, 1);
    const std::size_t n_strat = strategies.size();
    std::vector<double> deviation(n_paths * n_strat), quadratic(n_paths * n_strat);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto path = engine.realize(config.seed, p);
            for (std::size_t s = 0; s < n_strat; ++s) {
                auto trades = strategy_trades(strategies[s].kind, path, model.ic);
                for (const auto& tr : strategies[s].overlay)
                    trades.push_back({tr.time, strategies[s].overlay_scale * tr.delta_x});
                const auto c = price(trades, path, model.ic);
                deviation[p * n_strat + s] = c.deviation;
                quadratic[p * n_strat + s] = c.quadratic;
            }
        }
    };

    unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
    if (workers <= 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    run_range(std::min(n_paths, w * chunk), std::min(n_paths, (w + 1) * chunk));
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    std::vector<CostReport> out(n_strat);
    std::vector<double> column(n_paths), dev_col(n_paths), quad_col(n_paths);
    for (std::size_t s = 0; s < n_strat; ++s) {
        for (std::size_t p = 0; p < n_paths; ++p) {
            dev_col[p] = deviation[p * n_strat + s];
            quad_col[p] = quadratic[p * n_strat + s];
            column[p] = dev_col[p] + quad_col[p];
        }
        const double n = static_cast<double>(n_paths);
        auto& r = out[s];
        r.strategy = strategy_id(strategies[s].kind);
        if (!strategies[s].overlay.empty())
            r.strategy += "+perturbation";
        r.n_paths = n_paths;
        r.mean = pairwise_sum(column) / n;
        r.components.deviation = pairwise_sum(dev_col) / n;
        r.components.quadratic = pairwise_sum(quad_col) / n;
        if (n_paths > 1) {
            for (auto& v : column)
                v = (v - r.mean) * (v - r.mean);
            r.std_error = std::sqrt(pairwise_sum(column) / (n - 1.0) / n);
        }
    }
    return out;
}

CostReport expected_cost(const PathEngine& engine, const StrategySpec& strategy, const CostConfig& config)
{
    return expected_costs(engine, std::span(&strategy, 1), config).front();
}

PerturbationReport perturbation_test(const PathEngine& engine, std::span<const TradeList> directions,
                                     std::span<const double> eps_grid, const CostConfig& config)
{
    for (const auto& dir : directions) {
        double net = 0.0;
        for (const auto& tr : dir)
            net += tr.delta_x;
        if (std::abs(net) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "perturbation direction is not a round trip");
    }
    std::vector<StrategySpec> specs;
    specs.push_back({StrategyKind::Optimal, {}, 0.0});
    for (const auto& dir : directions)
        for (double eps : eps_grid)
            specs.push_back({StrategyKind::Optimal, dir, eps});

    const auto reports = expected_costs(engine, specs, config);
    PerturbationReport out;
    out.base_cost = reports[0].mean;
    std::size_t at = 1;
    for (std::size_t d = 0; d < directions.size(); ++d) {
        DirectionResult res;
        res.eps.assign(eps_grid.begin(), eps_grid.end());
        for (std::size_t e = 0; e < eps_grid.size(); ++e)
            res.costs.push_back(reports[at++].mean);
        double best = 0.0;
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            for (std::size_t j = 0; j < eps_grid.size(); ++j) {
                const double eps = eps_grid[i];
                if (eps > best && eps_grid[j] == -eps) {
                    best = eps;
                    res.first_derivative = (res.costs[i] - res.costs[j]) / (2.0 * eps);
                    res.second_difference = res.costs[i] - 2.0 * out.base_cost + res.costs[j];
                }
            }
        }
        out.directions.push_back(std::move(res));
    }
    return out;
}

} // namespace negres
