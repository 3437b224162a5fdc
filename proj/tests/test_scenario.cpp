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

#include "negres/error.hpp"
#include "negres/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace negres;

namespace {

constexpr const char* kMinimal = R"(scenario: demo
horizon: 3
model:
  segments:
    - {start: 0, end: 1, rho: 0.1, mu: 0.5, sigma: 0}
    - {start: 1, end: 2, rho: -0.05, mu: 0.5}
    - {start: 2, end: 3, rho: 1, mu: 0.5, sigma: 0}
)";

ErrorCode parse_code(const std::string& text)
{
    try {
        resolve(parse_scenario(text));
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

} // namespace

TEST_CASE("minimal scenario with defaults")
{
    const auto s = parse_scenario(kMinimal);
    CHECK(s.id == "demo");
    CHECK(s.horizon == 3.0);
    REQUIRE(s.segments.size() == 3);
    CHECK(s.segments[1].rho == -0.05);
    CHECK(s.segments[1].sigma == 0.0);
    CHECK(s.ic.x == 1.0);
    CHECK(s.ic.gamma0 == 1.0);
    CHECK(s.run.grid == 4000.0);
    CHECK(s.run.paths == 10000);
    CHECK(s.run.seed == 42);
    const auto r = resolve(s);
    REQUIRE(r.model.schedule);
    CHECK(r.model.schedule->eps_bar() == doctest::Approx(0.4));
}

TEST_CASE("registered scenarios round-trip through text")
{
    for (const auto& id : registered_ids()) {
        const auto s = registered_scenario(id);
        const auto text = emit_scenario(s);
        const auto back = parse_scenario(text);
        INFO(id << "\n" << text);
        CHECK(back == s);
        CHECK(emit_scenario(back) == text);
    }
}

TEST_CASE("full file with every block")
{
    const auto s = parse_scenario(R"(scenario: full
description: all blocks
horizon: 3
model:
  segments:
    - {start: 0, end: 1, rho: 0.01, mu: 3, sigma: 1}
    - start: 1
      end: 2
      rho_formula: {family: closure, kappa: 2.416}
      mu: 3
      sigma: 1
    - {start: 2, end: 3, rho: 1, mu: 3, sigma: 1}
initial_condition: {x: 2, d: 0.5, gamma0: 1.5}
run: {grid: 1000, paths: 123, seed: 7}
outputs: {directory: somewhere, formats: [csv]}
)");
    REQUIRE(s.segments[1].rho_formula);
    CHECK(s.segments[1].rho_formula->kappa == 2.416);
    CHECK(s.ic.d == 0.5);
    CHECK(s.run.paths == 123);
    CHECK(s.outputs.directory == "somewhere");
    CHECK(s.outputs.formats == std::vector<std::string>{"csv"});
    const auto r = resolve(s);
    CHECK(r.kappa == 2.416);
    CHECK_FALSE(r.kappa_calibrated);
    CHECK(parse_scenario(emit_scenario(s)) == s);
}

TEST_CASE("closure kappa is calibrated on request")
{
    const auto r = resolve(registered_scenario("S7"));
    REQUIRE(r.kappa);
    CHECK(r.kappa_calibrated);
    CHECK(std::abs(*r.kappa - 2.416) <= 5e-3);
}

TEST_CASE("regime chain block")
{
    const auto s = parse_scenario(R"(scenario: chain
horizon: 2
model:
  regime_chain:
    states:
      - {rho: 0.2, mu: 1, sigma: 0}
      - {rho: -0.2, mu: 1}
    generator:
      - [-1, 1]
      - [2, -2]
    initial_state: 1
)");
    REQUIRE(s.chain);
    CHECK(s.chain->states.size() == 2);
    CHECK(s.chain->initial_state == 1);
    const auto r = resolve(s);
    REQUIRE(r.model.chain);
    CHECK(r.model.chain->rate(1, 0) == 2.0);
    CHECK(parse_scenario(emit_scenario(s)) == s);
}

TEST_CASE("malformed files are rejected")
{
    const std::string base = kMinimal;
    CHECK(parse_code(base + "colour: blue\n") == ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: 1, mu: 1, "
                     "speed: 2}\n") == ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, mu: 1}\n") ==
          ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: 1, "
                     "rho_formula: {family: closure}, mu: 1}\n") == ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: one\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: 1, mu: 1}\n") ==
          ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho_formula: "
                     "{family: spline}, mu: 1}\n") == ErrorCode::ParseError);
    CHECK(parse_code("scenario: [unclosed\n") == ErrorCode::ParseError);
    CHECK(parse_code("scenario: x\nhorizon: 1\n") == ErrorCode::ParseError);
    CHECK(parse_code(base + "outputs: {formats: [pdf]}\n") == ErrorCode::ParseError);
}

TEST_CASE("model-level errors surface from resolve")
{
    CHECK(parse_code("scenario: x\nhorizon: 2\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: 1, mu: 1}\n") ==
          ErrorCode::GapOrOverlap);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: -0.3, mu: "
                     "0.5}\n") == ErrorCode::AssumptionViolated);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho: 1, mu: 1}\n"
                     "initial_condition: {gamma0: 0}\n") == ErrorCode::InvalidArgument);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  regime_chain:\n    states:\n      - {rho: 1, mu: 1}\n"
                     "      - {rho: 1, mu: 1}\n    generator:\n      - [-1, 1]\n      - [1]\n") ==
          ErrorCode::InvalidArgument);
    CHECK(parse_code("scenario: x\nhorizon: 1\nmodel:\n  segments:\n    - {start: 0, end: 1, rho_formula: "
                     "{family: closure}, mu: 3, sigma: 1}\n") == ErrorCode::InvalidArgument);
}

TEST_CASE("scenario references")
{
    const auto dir = std::filesystem::temp_directory_path() / "negres_scenario_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "demo.yaml";
    std::ofstream(path) << kMinimal;
    CHECK(load_scenario_ref(path.string()).id == "demo");
    CHECK(load_scenario_ref("S3").segments[1].rho == -0.15);
    CHECK_THROWS_AS(load_scenario_ref("nope"), Error);
    CHECK_THROWS_AS(registered_scenario("S9"), Error);
    CHECK(registered_scenario("S4").segments[0].sigma == std::sqrt(0.1));
    std::filesystem::remove_all(dir);
}
