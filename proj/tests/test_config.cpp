#include "safesmc/config.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>

using namespace safesmc;

TEST_CASE("empty document gives the defaults") {
    CHECK(parse_config("") == ScenarioConfig{});
    CHECK(parse_config("{}") == ScenarioConfig{});
}

TEST_CASE("every demo round-trips through YAML") {
    for (const auto& name : demo_names()) {
        const auto config = demo_config(name);
        const auto text = emit_config(config);
        INFO(text);
        CHECK(parse_config(text) == config);
    }
}

TEST_CASE("awkward values round-trip exactly") {
    auto c = demo_config("robot-s1a");
    c.dt = 0.1 + 0.2;
    c.z0 = -1.0 / 3.0;
    c.max_abs_us = 1e300;
    c.z_reset_threshold.reset();
    c.trajectory_path = "out dir/run: 1.csv";
    CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("shipped config files match the built-in demos") {
    const std::filesystem::path dir = std::filesystem::path(SAFESMC_SOURCE_DIR) / "configs";
    for (const auto& name : demo_names()) {
        INFO(name);
        const auto path = dir / (name + ".yaml");
        REQUIRE(std::filesystem::exists(path));
        auto file = load_config(path.string());
        file.trajectory_path.clear();
        file.summary_path.clear();
        file.plot_script_path.clear();
        CHECK(file == demo_config(name));
    }
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config("safeguard:\n  h1: 1\n  hh2: 0.2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("safeguard.hh2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("bogus: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sliding:\n  switching: {kind: sat, eps: 1}\n"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("sim: {dt: fast}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sim: {integrator: midpoint}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sim: {record_stride: 0}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("plant: {family: quadrotor}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sliding: {switching: {kind: tanh}}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("safeguard: {channel: {rule: random}}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sim: [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sim: 3\n"), ConfigError);
}

TEST_CASE("null clears optional fields") {
    const auto c = parse_config("safeguard: {z_reset_threshold: null, max_abs_us: 50}\n");
    CHECK_FALSE(c.z_reset_threshold);
    CHECK(c.max_abs_us == 50.0);
}

TEST_CASE("build checks shapes") {
    auto c = demo_config("robot-s1a");
    c.x0 = {1, 2, 3};
    CHECK_THROWS_AS(build(c), ConfigError);
    c = demo_config("robot-s1a");
    c.M = {{1, 0}};
    CHECK_THROWS_AS(build(c), ConfigError);
    c = demo_config("robot-s1a");
    c.channel_rule = ChannelRuleName::Fixed;
    c.channel_j = 3;
    CHECK_THROWS_AS(build(c), ConfigError);
}

TEST_CASE("demo presets") {
    CHECK_THROWS_AS(demo_config("robot-s2"), ConfigError);

    const auto z50 = demo_config("robot-z50");
    CHECK(z50.z0 == -50.0);
    CHECK_FALSE(z50.z_reset_threshold);

    const auto sat = testing::demo("robot-sat");
    CHECK(sat.scenario.sliding.switching.kind == SwitchingKind::Sat);
    CHECK(sat.scenario.sliding.switching.epsilon == 0.5);

    const auto alt = testing::demo("robot-altmanifold");
    CHECK(alt.scenario.sliding.M == Matrix{{1, -1}, {1, 1}});
    CHECK(alt.scenario.params.channel.kind == ChannelRuleKind::Fixed);
    CHECK(alt.scenario.params.channel.fixed == 0);
    CHECK(alt.scenario.safety.h(testing::vec({0, 3})) == -2.25);
}

TEST_CASE("sweep parameters map onto the config") {
    auto c = demo_config("robot-s1a");
    for (const auto& name : sweep_parameters()) set_parameter(c, name, 0.75);
    CHECK(c.h1 == 0.75);
    CHECK(c.h_bar == 0.75);
    CHECK(c.dt == 0.75);
    CHECK_THROWS_AS(set_parameter(c, "beta0", 1.0), ConfigError);
}
