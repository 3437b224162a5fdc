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

#include "negres/scenario.hpp"

#include "negres/effects.hpp"
#include "negres/error.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace negres {

bool ChainSpec::operator==(const ChainSpec& o) const
{
    if (states.size() != o.states.size() || generator != o.generator || initial_state != o.initial_state)
        return false;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& a = states[i];
        const auto& b = o.states[i];
        if (a.rho != b.rho || a.mu != b.mu || a.sigma != b.sigma)
            return false;
    }
    return true;
}

bool ScenarioFile::operator==(const ScenarioFile& o) const
{
    return id == o.id && description == o.description && horizon == o.horizon && segments == o.segments &&
           chain == o.chain && ic.x == o.ic.x && ic.d == o.ic.d && ic.gamma0 == o.ic.gamma0 && run == o.run &&
           outputs == o.outputs;
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!node.IsMap())
        parse_fail(where + ": expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!ok.count(key))
            parse_fail(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T read(const YAML::Node& node, const std::string& where)
{
    if (!node || !node.IsScalar())
        parse_fail(where + ": missing or not a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        parse_fail(where + ": bad value '" + node.Scalar() + "'");
    }
}

double read_number(const YAML::Node& node, const std::string& where)
{
    const double v = read<double>(node, where);
    if (!std::isfinite(v))
        parse_fail(where + ": not a finite number");
    return v;
}

template <typename T>
T read_or(const YAML::Node& parent, const char* key, T fallback, const std::string& where)
{
    const auto node = parent[key];
    if (!node)
        return fallback;
    if constexpr (std::is_same_v<T, double>)
        return read_number(node, where + "." + key);
    else
        return read<T>(node, where + "." + key);
}

Params read_params(const YAML::Node& node, const std::string& where)
{
    check_keys(node, where, {"rho", "mu", "sigma"});
    return {read_number(node["rho"], where + ".rho"), read_number(node["mu"], where + ".mu"),
            read_or(node, "sigma", 0.0, where)};
}

SegmentSpec read_segment(const YAML::Node& node, const std::string& where)
{
    check_keys(node, where, {"start", "end", "rho", "rho_formula", "mu", "sigma"});
    SegmentSpec s;
    s.start = read_number(node["start"], where + ".start");
    s.end = read_number(node["end"], where + ".end");
    s.mu = read_number(node["mu"], where + ".mu");
    s.sigma = read_or(node, "sigma", 0.0, where);
    if (node["rho"] && node["rho_formula"])
        parse_fail(where + ": give either rho or rho_formula, not both");
    if (node["rho"]) {
        s.rho = read_number(node["rho"], where + ".rho");
    } else if (const auto f = node["rho_formula"]) {
        check_keys(f, where + ".rho_formula", {"family", "kappa"});
        RhoFormulaSpec spec;
        spec.family = read_or<std::string>(f, "family", "closure", where + ".rho_formula");
        if (spec.family != "closure")
            parse_fail(where + ".rho_formula: unknown family '" + spec.family + "'");
        const auto k = f["kappa"];
        if (!k || (k.IsScalar() && k.Scalar() == "calibrate"))
            spec.kappa = std::nullopt;
        else
            spec.kappa = read_number(k, where + ".rho_formula.kappa");
        s.rho_formula = spec;
    } else {
        parse_fail(where + ": needs rho or rho_formula");
    }
    return s;
}

ChainSpec read_chain(const YAML::Node& node, const std::string& where)
{
    check_keys(node, where, {"states", "generator", "initial_state"});
    ChainSpec chain;
    const auto states = node["states"];
    if (!states || !states.IsSequence())
        parse_fail(where + ".states: expected a list");
    for (std::size_t i = 0; i < states.size(); ++i)
        chain.states.push_back(read_params(states[i], where + ".states[" + std::to_string(i) + "]"));
    const auto gen = node["generator"];
    if (!gen || !gen.IsSequence())
        parse_fail(where + ".generator: expected a list of rows");
    for (std::size_t i = 0; i < gen.size(); ++i) {
        if (!gen[i].IsSequence())
            parse_fail(where + ".generator: rows must be lists");
        std::vector<double> row;
        for (std::size_t j = 0; j < gen[i].size(); ++j)
            row.push_back(read_number(gen[i][j], where + ".generator"));
        chain.generator.push_back(std::move(row));
    }
    chain.initial_state = read_or<std::uint64_t>(node, "initial_state", 0, where);
    return chain;
}

std::string fmt_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void emit_params(YAML::Emitter& e, const Params& p)
{
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "rho" << YAML::Value << fmt_number(p.rho);
    e << YAML::Key << "mu" << YAML::Value << fmt_number(p.mu);
    e << YAML::Key << "sigma" << YAML::Value << fmt_number(p.sigma);
    e << YAML::EndMap;
}

} // namespace

ScenarioFile parse_scenario(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& ex) {
        parse_fail(std::string("invalid YAML: ") + ex.what());
    }
    check_keys(root, "scenario file",
               {"scenario", "description", "horizon", "model", "initial_condition", "run", "outputs"});
    ScenarioFile s;
    s.id = read<std::string>(root["scenario"], "scenario");
    s.description = read_or<std::string>(root, "description", "", "scenario file");
    s.horizon = read_number(root["horizon"], "horizon");

    const auto model = root["model"];
    if (!model)
        parse_fail("model: missing");
    check_keys(model, "model", {"segments", "regime_chain"});
    if (model["segments"] && model["regime_chain"])
        parse_fail("model: give either segments or regime_chain");
    if (const auto segs = model["segments"]) {
        if (!segs.IsSequence() || segs.size() == 0)
            parse_fail("model.segments: expected a non-empty list");
        for (std::size_t i = 0; i < segs.size(); ++i)
            s.segments.push_back(read_segment(segs[i], "model.segments[" + std::to_string(i) + "]"));
    } else if (const auto chain = model["regime_chain"]) {
        s.chain = read_chain(chain, "model.regime_chain");
    } else {
        parse_fail("model: needs segments or regime_chain");
    }

    if (const auto ic = root["initial_condition"]) {
        check_keys(ic, "initial_condition", {"x", "d", "gamma0"});
        s.ic.x = read_or(ic, "x", 1.0, "initial_condition");
        s.ic.d = read_or(ic, "d", 0.0, "initial_condition");
        s.ic.gamma0 = read_or(ic, "gamma0", 1.0, "initial_condition");
    }
    if (const auto run = root["run"]) {
        check_keys(run, "run", {"grid", "paths", "seed"});
        s.run.grid = read_or(run, "grid", s.run.grid, "run");
        s.run.paths = read_or<std::uint64_t>(run, "paths", s.run.paths, "run");
        s.run.seed = read_or<std::uint64_t>(run, "seed", s.run.seed, "run");
    }
    if (const auto out = root["outputs"]) {
        check_keys(out, "outputs", {"directory", "formats"});
        s.outputs.directory = read_or<std::string>(out, "directory", "", "outputs");
        if (const auto formats = out["formats"]) {
            if (!formats.IsSequence())
                parse_fail("outputs.formats: expected a list");
            s.outputs.formats.clear();
            for (const auto& f : formats) {
                const auto name = read<std::string>(f, "outputs.formats");
                if (name != "csv" && name != "svg" && name != "json")
                    parse_fail("outputs.formats: unknown format '" + name + "'");
                s.outputs.formats.push_back(name);
            }
        }
    }
    return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string emit_scenario(const ScenarioFile& s)
{
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "scenario" << YAML::Value << s.id;
    if (!s.description.empty())
        e << YAML::Key << "description" << YAML::Value << s.description;
    e << YAML::Key << "horizon" << YAML::Value << fmt_number(s.horizon);
    e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    if (s.chain) {
        e << YAML::Key << "regime_chain" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : s.chain->states)
            emit_params(e, p);
        e << YAML::EndSeq;
        e << YAML::Key << "generator" << YAML::Value << YAML::BeginSeq;
        for (const auto& row : s.chain->generator) {
            e << YAML::Flow << YAML::BeginSeq;
            for (double q : row)
                e << fmt_number(q);
            e << YAML::EndSeq;
        }
        e << YAML::EndSeq;
        e << YAML::Key << "initial_state" << YAML::Value << s.chain->initial_state;
        e << YAML::EndMap;
    } else {
        e << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
        for (const auto& seg : s.segments) {
            e << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "start" << YAML::Value << fmt_number(seg.start);
            e << YAML::Key << "end" << YAML::Value << fmt_number(seg.end);
            if (seg.rho) {
                e << YAML::Key << "rho" << YAML::Value << fmt_number(*seg.rho);
            } else {
                e << YAML::Key << "rho_formula" << YAML::Value << YAML::BeginMap;
                e << YAML::Key << "family" << YAML::Value << seg.rho_formula->family;
                e << YAML::Key << "kappa" << YAML::Value
                  << (seg.rho_formula->kappa ? fmt_number(*seg.rho_formula->kappa) : std::string("calibrate"));
                e << YAML::EndMap;
            }
            e << YAML::Key << "mu" << YAML::Value << fmt_number(seg.mu);
            e << YAML::Key << "sigma" << YAML::Value << fmt_number(seg.sigma);
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
    }
    e << YAML::EndMap;
    e << YAML::Key << "initial_condition" << YAML::Value << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "x" << YAML::Value << fmt_number(s.ic.x);
    e << YAML::Key << "d" << YAML::Value << fmt_number(s.ic.d);
    e << YAML::Key << "gamma0" << YAML::Value << fmt_number(s.ic.gamma0);
    e << YAML::EndMap;
    e << YAML::Key << "run" << YAML::Value << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "grid" << YAML::Value << fmt_number(s.run.grid);
    e << YAML::Key << "paths" << YAML::Value << s.run.paths;
    e << YAML::Key << "seed" << YAML::Value << s.run.seed;
    e << YAML::EndMap;
    e << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    if (!s.outputs.directory.empty())
        e << YAML::Key << "directory" << YAML::Value << s.outputs.directory;
    e << YAML::Key << "formats" << YAML::Value << YAML::Flow << s.outputs.formats;
    e << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

namespace {

ScenarioFile three_regime(const std::string& id, const std::string& description, double rho2, double sigma)
{
    ScenarioFile s;
    s.id = id;
    s.description = description;
    s.horizon = 3.0;
    s.segments = {{0.0, 1.0, 0.1, std::nullopt, 0.5, sigma},
                  {1.0, 2.0, rho2, std::nullopt, 0.5, sigma},
                  {2.0, 3.0, 1.0, std::nullopt, 0.5, sigma}};
    return s;
}

} // namespace

std::vector<std::string> registered_ids() { return {"S1", "S2", "S3", "S4", "S5", "S6", "S7", "R1", "R2"}; }

ScenarioFile registered_scenario(std::string_view id)
{
    const double noisy = std::sqrt(0.1);
    if (id == "S1")
        return three_regime("S1", "negative resilience far from T, no effects", -0.05, 0.0);
    if (id == "S2")
        return three_regime("S2", "overjumping zero and premature closure", -0.09, 0.0);
    if (id == "S3")
        return three_regime("S3", "overjumping zero only", -0.15, 0.0);
    if (id == "S4")
        return three_regime("S4", "stochastic depth, no effects", -0.05, noisy);
    if (id == "S5")
        return three_regime("S5", "stochastic depth, overjumping zero and premature closure", -0.07, noisy);
    if (id == "S6")
        return three_regime("S6", "stochastic depth, overjumping zero only", -0.15, noisy);
    if (id == "S7") {
        ScenarioFile s;
        s.id = "S7";
        s.description = "position kept closed on [T1, T2)";
        s.horizon = 3.0;
        s.segments = {{0.0, 1.0, 0.01, std::nullopt, 3.0, 1.0},
                      {1.0, 2.0, std::nullopt, RhoFormulaSpec{"closure", std::nullopt}, 3.0, 1.0},
                      {2.0, 3.0, 1.0, std::nullopt, 3.0, 1.0}};
        return s;
    }
    if (id == "R1" || id == "R2") {
        ScenarioFile s;
        s.id = std::string(id);
        s.horizon = 3.0;
        ChainSpec chain;
        if (id == "R1") {
            s.description = "two-state resilience chain, deterministic depth";
            chain.states = {{0.2, 1.0, 0.0}, {-0.2, 1.0, 0.0}};
            chain.generator = {{-1.0, 1.0}, {1.0, -1.0}};
        } else {
            s.description = "two-state resilience chain, stochastic depth";
            chain.states = {{1.0, 0.5, noisy}, {-0.1, 0.5, noisy}};
            chain.generator = {{-2.0, 2.0}, {2.0, -2.0}};
        }
        s.chain = chain;
        return s;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown scenario id '" + std::string(id) + "'");
}

ScenarioFile load_scenario_ref(std::string_view ref)
{
    const std::filesystem::path p{std::string(ref)};
    if (std::filesystem::exists(p))
        return load_scenario(p);
    for (const auto& id : registered_ids())
        if (id == ref)
            return registered_scenario(ref);
    throw Error(ErrorCode::IoError, "no scenario file or registered scenario named '" + std::string(ref) + "'");
}

ResolvedScenario resolve(const ScenarioFile& file)
{
    ResolvedScenario out;
    out.file = file;
    validate_initial_condition(file.ic);
    if (!(file.horizon > 0.0))
        throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    if (!(file.run.grid > 0.0))
        throw Error(ErrorCode::InvalidArgument, "run.grid must be positive");
    out.model.horizon = file.horizon;
    out.model.ic = file.ic;

    if (file.chain) {
        RegimeChain chain;
        chain.states = file.chain->states;
        const std::size_t n = chain.states.size();
        for (const auto& row : file.chain->generator) {
            if (row.size() != n)
                throw Error(ErrorCode::InvalidArgument, "generator rows must have one entry per state");
            chain.generator.insert(chain.generator.end(), row.begin(), row.end());
        }
        chain.initial_state = static_cast<std::size_t>(file.chain->initial_state);
        validate_chain(chain);
        out.model.chain = std::move(chain);
        return out;
    }

    std::vector<ParameterSegment> segments(file.segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = file.segments[i];
        segments[i] = {s.start, s.end, s.rho.value_or(0.0), s.mu, s.sigma, std::nullopt};
    }
    std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    auto spec_for = [&](const ParameterSegment& seg) -> const SegmentSpec& {
        for (const auto& s : file.segments)
            if (s.start == seg.start && s.end == seg.end)
                return s;
        throw Error(ErrorCode::InvalidArgument, "segment lookup failed");
    };

    // Right to left, so every calibration sees a fully specified tail.
    for (std::size_t i = segments.size(); i-- > 0;) {
        const auto& spec = spec_for(segments[i]);
        if (!spec.rho_formula)
            continue;
        if (spec.rho_formula->kappa) {
            segments[i].rho_formula = ClosureRho{*spec.rho_formula->kappa};
            out.kappa = *spec.rho_formula->kappa;
            continue;
        }
        if (i + 1 == segments.size())
            throw Error(ErrorCode::InvalidArgument, "kappa calibration needs a segment after the closure segment");
        const double t2 = segments[i].end;
        std::vector<ParameterSegment> tail(segments.begin() + static_cast<std::ptrdiff_t>(i + 1), segments.end());
        for (auto& s : tail) {
            s.start -= t2;
            s.end -= t2;
        }
        const auto tail_schedule = build_schedule(std::move(tail), file.horizon - t2);
        const double y2 = solve_Y_backward(tail_schedule, file.run.grid).values.front();
        const double kappa = closure_kappa(y2, file.horizon, t2);
        segments[i].rho_formula = ClosureRho{kappa};
        out.kappa = kappa;
        out.kappa_calibrated = true;
    }
    out.model.schedule = build_schedule(std::move(segments), file.horizon);
    return out;
}

} // namespace negres
