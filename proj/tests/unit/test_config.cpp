#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "kawarada/config.hpp"
#include "kawarada/error.hpp"

using namespace kawarada;

namespace {

const char* kBase = R"(seed = 9

[problem]
edges = 2 1 0.5
q = 1

[grid]
dim = 3
kind = uniform
n = 3 4 5

[stepping]
tau0 = 1e-3

[guard]
strict = true

[output]
prefix = out/run
)";

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "cfg.ini");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("base config parses") {
    const auto c = parse_config(kBase);
    CHECK(c.seed == 9);
    CHECK(c.spec.edges[2] == 0.5);
    CHECK(c.spec.q == 1.0);
    CHECK(c.run.strict);
    CHECK(c.run.controller.tau0 == 1e-3);
    CHECK(c.output.prefix == "out/run");
    const auto mesh = c.build_mesh();
    CHECK(mesh.counts() == std::array<std::size_t, 3>{3, 4, 5});
}

TEST_CASE("endpoint weight config") {
    const auto c = parse_config(R"(
[problem]
edges = pi 1 1
weight = endpoint
u0 = sine
u0_value = 0.001   # amplitude
[grid]
dim = 1
n = 10
[stepping]
cap = 2e-5
adaptive = false
[guard]
[output]
formats = csv
)");
    CHECK(c.spec.edges[0] == std::numbers::pi);
    REQUIRE(c.spec.custom_weight);
    const double p = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(c.spec.custom_weight(1.0, 0.0, 0.0) == doctest::Approx(std::pow(std::numbers::pi - 1.0, 1.0 - p)));
    CHECK(c.run.controller.cap_mode == TauCapMode::Fixed);
    CHECK(c.run.controller.cap_value == 2e-5);
    CHECK_FALSE(c.run.controller.adaptive);
    CHECK(c.output.csv);
    CHECK_FALSE(c.output.jsonl);
    CHECK(c.build_mesh().dim() == 1);
}

TEST_CASE("errors are anchored to lines") {
    std::string text = kBase;
    text += "colour = red\n";
    CHECK(config_error(text).find("cfg.ini:20: unknown key 'colour'") != std::string::npos);

    text = kBase;
    text.replace(text.find("q = 1"), 5, "q = one");
    CHECK(config_error(text).find("cfg.ini:5:") != std::string::npos);

    CHECK(config_error("[problem]\n[grid]\nn=3\n[stepping]\n[guard]\n[oops]\n").find("cfg.ini:6: unknown section") !=
          std::string::npos);
    CHECK(config_error("[problem]\nq = 1\nq = 2\n").find("cfg.ini:3: duplicate key") != std::string::npos);
    CHECK(config_error("[problem]\njust words\n").find("cfg.ini:2: expected key = value") != std::string::npos);
}

TEST_CASE("missing sections are rejected") {
    std::string text = kBase;
    const auto g = text.find("[grid]");
    text.erase(g, text.find("[stepping]") - g);
    CHECK(config_error(text).find("missing section [grid]") != std::string::npos);
}

TEST_CASE("value validation") {
    auto with = [](const std::string& from, const std::string& to) {
        std::string t = kBase;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_FALSE(config_error(with("n = 3 4 5", "n = 3 4")).empty());
    CHECK_FALSE(config_error(with("edges = 2 1 0.5", "edges = 2 -1 0.5")).empty());
    CHECK_FALSE(config_error(with("strict = true", "strict = maybe")).empty());
    CHECK_FALSE(config_error(with("tau0 = 1e-3", "tau0 = 0")).empty());
    CHECK_FALSE(config_error(with("kind = uniform", "kind = spiral")).empty());
    CHECK(config_error(with("n = 3 4 5", "n = 4")).empty());
}
