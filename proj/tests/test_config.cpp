#include "decoh/config.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace decoh;
using namespace decoh::harness;

namespace {

const std::string kMinimal = R"({
  "schema_version": 1,
  "seed": 11,
  "model": {"family": "HenonHeiles"},
  "initial": {"z": [0.0, 0.1, 0.3, 0.0]}
})";

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& p, const std::string& needle) {
    return std::any_of(p.begin(), p.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.seed == 11u);
    CHECK(c.model.family == "HenonHeiles");
    CHECK(c.z.qy == 0.1);
    CHECK(c.delta_z.qx == 0.0);
    CHECK(c.integrator.dt == 0.01);
    CHECK(c.integrator.n_steps == 10000);
    CHECK(c.engine == Engine::Classical);
    CHECK(c.bath.density.omega_max == 10.0);
    CHECK(validate(c).empty());
    CHECK_NOTHROW(c.model.build());
}

TEST_CASE("canonical form round-trips") {
    auto c = parse_config(kMinimal);
    c.engine = Engine::Both;
    c.quantum.sigma_x = 0.4;
    c.integrator.energy_drift_bound = 1e-6;
    c.fit.expect = Expectation::Chaotic;
    c.c2 = {0.0, -1.0};
    c.model.params["lambda"] = 1.0;
    const auto text = to_json(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(to_json(back) == text);
}

TEST_CASE("sampling too coarse for the bath cutoff") {
    const auto p = problems_of(replace(kMinimal, "\"seed\": 11,", "\"seed\": 11, \"integrator\": {\"dt\": 0.05},"
                                                                  " \"bath\": {\"omega_max\": 100},"));
    REQUIRE(mentions(p, "bath.sampling"));
}

TEST_CASE("unknown family lists the valid ones") {
    const auto p = problems_of(replace(kMinimal, "HenonHeiles", "Lorenz63"));
    REQUIRE(mentions(p, "unknown family 'Lorenz63'"));
    CHECK(mentions(p, "PullenEdmonds"));
}

TEST_CASE("every problem is reported") {
    std::string text = replace(kMinimal, "\"seed\": 11,", "");
    text = replace(text, "\"schema_version\": 1", "\"schema_version\": 1, \"integrator\": {\"dt\": -1, \"bogus\": 2}");
    const auto p = problems_of(text);
    CHECK(mentions(p, "seed"));
    CHECK(mentions(p, "integrator.dt"));
    CHECK(mentions(p, "bogus"));
    CHECK(p.size() >= 3);
}

TEST_CASE("type errors and missing fields") {
    CHECK(mentions(problems_of(replace(kMinimal, "\"seed\": 11", "\"seed\": \"eleven\"")), "seed"));
    CHECK(mentions(problems_of(replace(kMinimal, "[0.0, 0.1, 0.3, 0.0]", "[0.0, 0.1]")), "initial.z"));
    CHECK(mentions(problems_of(replace(kMinimal, "\"schema_version\": 1", "\"schema_version\": 7")),
                   "schema_version"));
}

TEST_CASE("parse errors carry the position") {
    const auto p = problems_of("{\n  \"seed\": 1,\n  oops\n}");
    REQUIRE(!p.empty());
    CHECK(mentions(p, "line 3"));
}

TEST_CASE("quantum checks apply only to quantum engines") {
    const std::string q = replace(kMinimal, "\"seed\": 11,", "\"seed\": 11, \"quantum\": {\"nx\": 100},");
    CHECK(problems_of(q).empty());
    CHECK(mentions(problems_of(replace(q, "\"seed\": 11,", "\"seed\": 11, \"engine\": \"quantum\",")), "quantum"));
}

TEST_CASE("engine names") {
    CHECK(parse_engine("both") == Engine::Both);
    CHECK(to_string(Engine::Quantum) == "quantum");
    CHECK_FALSE(parse_engine("hybrid"));
}
