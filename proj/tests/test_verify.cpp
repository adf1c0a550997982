#include "safesmc/verify.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace safesmc;
using testing::vec;

namespace {

struct Fixture {
    BuiltScenario built;
    RunResult result;
};

const Fixture& s1a() {
    static const Fixture f = [] {
        auto built = testing::demo("robot-s1a");
        auto result = run(built.scenario, built.sim, built.options);
        return Fixture{std::move(built), std::move(result)};
    }();
    return f;
}

const Fixture& baseline() {
    static const Fixture f = [] {
        auto built = testing::demo("robot-s1a");
        built.options.safeguard_enabled = false;
        built.sim.t_end = 1.5;
        auto result = run(built.scenario, built.sim, built.options);
        return Fixture{std::move(built), std::move(result)};
    }();
    return f;
}

}  // namespace

TEST_CASE("safety report") {
    const auto& f = s1a();
    auto rep = safety_report(f.result.records, f.built.scenario.safety);
    CHECK(rep.min_h >= -kSafetyTolerance);
    CHECK(rep.passed());

    const auto& b = baseline();
    rep = safety_report(b.result.records, b.built.scenario.safety);
    CHECK(rep.min_h < 0.0);
    REQUIRE(rep.first_violation);
    CHECK(*rep.first_violation > 0.0);

    auto far = testing::demo("robot-s1a");
    far.sim.x0 = vec({0.1, 0.1});
    far.sim.t_end = 0.5;
    const auto near_origin = run(far.scenario, far.sim, far.options);
    rep = safety_report(near_origin.records, far.scenario.safety);
    CHECK(rep.passed());
    double lowest = 1e9;
    for (const auto& r : near_origin.records) lowest = std::min(lowest, far.scenario.safety.h(r.x));
    CHECK(rep.min_h == lowest);

    CHECK_THROWS_AS(safety_report({}, f.built.scenario.safety), EmptyTrajectory);
}

TEST_CASE("inequality residuals") {
    const auto& f = s1a();
    const auto rep = inequality_residuals(f.result.records, f.built.scenario);
    CHECK(rep.samples > 100);
    CHECK(rep.min_residual >= -kResidualTolerance);
    CHECK(rep.min_residual <= 1e-6);  // equality by construction

    auto faulty = f.result.records;
    for (auto& r : faulty) {
        if (r.u_s == 0.0) continue;
        const double half = 0.5 * r.u_s;
        r.u = r.u_smc;
        r.u(1) += half;
        r.u_s = half;
    }
    const auto broken = inequality_residuals(faulty, f.built.scenario);
    CHECK_FALSE(broken.passed());

    const auto none = inequality_residuals(baseline().result.records, baseline().built.scenario);
    CHECK(none.vacuous());
    CHECK(none.passed());
}

TEST_CASE("barrier certificate") {
    const auto& f = s1a();
    CHECK(barrier_certificate(f.result.records, f.built.scenario.safety, f.built.scenario.params).passed());

    const auto& b = baseline();
    const auto rep = barrier_certificate(b.result.records, b.built.scenario.safety, b.built.scenario.params);
    CHECK_FALSE(rep.passed());
    REQUIRE(rep.worst_time);

    // Constant positive h_Y with a linear alpha gives residual alpha(h_Y).
    const auto sc = testing::section_v();
    std::vector<TrajectoryRecord> flat(3);
    for (std::size_t k = 0; k < flat.size(); ++k) {
        flat[k].t = 0.1 * static_cast<double>(k);
        flat[k].x = vec({7, 7});
        flat[k].z = 0.0;
        flat[k].mode = Mode::Active;
    }
    const auto c = barrier_certificate(flat, sc.safety, sc.params);
    CHECK(c.min_residual == Catch::Approx(10.0 * 16.0));
    CHECK(c.tolerance == 0.0);
}

TEST_CASE("lyapunov report") {
    const auto& f = s1a();
    const auto rep = lyapunov_report(f.result.records, f.built.scenario.plant, f.built.scenario.sliding,
                                     f.built.scenario.params);
    CHECK(rep.violations.empty());
    CHECK(rep.samples > 1000);
    CHECK(rep.excluded_resets == 2 * f.result.events.reset_times.size());
    CHECK_FALSE(rep.exempt);

    auto sat = testing::demo("robot-sat");
    sat.sim.t_end = 1.0;
    const auto sat_run = run(sat.scenario, sat.sim, sat.options);
    const auto sat_rep = lyapunov_report(sat_run.records, sat.scenario.plant, sat.scenario.sliding, sat.scenario.params);
    CHECK(sat_rep.exempt);
    CHECK(sat_rep.passed());
}

TEST_CASE("feasibility oracle") {
    const Grid grid;
    CHECK(grid.size() == 400001);
    CHECK(feasibility_oracle(5, 1, 2, grid));
    CHECK_FALSE(feasibility_oracle(0.1, 1, 2, grid));
    CHECK(feasibility_oracle(0, 0, 0, grid));
}

TEST_CASE("parallel oracle matches the serial reference") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    const Grid grid{-200.0, 200.0, 1e-2};
    for (int i = 0; i < 200; ++i) {
        const double a = d(rng), b = d(rng), c = d(rng);
        CHECK(feasibility_margin(a, b, c, grid) == feasibility_margin_serial(a, b, c, grid));
    }
}

TEST_CASE("closed form agrees with the grid on random coefficient triples") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    const Grid grid;
    SafeguardParams params;
    params.max_abs_us = grid.hi;
    SafetySpec safety;
    safety.omega_radius = 0.0;

    int agree = 0, ambiguous = 0;
    for (int i = 0; i < 1000; ++i) {
        SafeguardCoefficients k;
        k.a = vec({d(rng)});
        k.b = d(rng);
        k.c = d(rng);
        bool raised = false;
        try {
            safeguard_control(k, 0, vec({1}), Mode::Active, safety, params);
        } catch (const InfeasibleSafeguard&) {
            raised = true;
        }
        const bool strict = feasibility_oracle(k, 0, grid);
        const bool slack = feasibility_oracle(k, 0, grid, grid_slack(k.a(0), k.b, grid));
        if (strict != slack) {
            ++ambiguous;
            continue;
        }
        if (raised == strict) FAIL("a=" << k.a(0) << " b=" << k.b << " c=" << k.c);
        ++agree;
    }
    CHECK(agree + ambiguous == 1000);
}

TEST_CASE("monitors do not touch the log") {
    const auto& f = s1a();
    const auto copy = f.result.records;
    verify_all(f.result.records, f.built.scenario);
    CHECK(identical(copy, f.result.records));
}

TEST_CASE("verify summary and exit status") {
    const auto& f = s1a();
    const auto sum = verify_all(f.result.records, f.built.scenario);
    CHECK(sum.upsilon_in_range);
    REQUIRE(sum.reach_time);
    CHECK(*sum.reach_time <= sum.reach_bound);
    CHECK(sum.reach_bound == Catch::Approx(217.2556098240043));
    CHECK(exit_status(f.result.status, sum) == 0);

    const auto& b = baseline();
    CHECK(exit_status(b.result.status, verify_all(b.result.records, b.built.scenario)) == 2);
    CHECK(exit_status(RunStatus::InfeasibleSafeguard, sum) == 3);
    CHECK(exit_status(RunStatus::NonFiniteState, sum) == 4);
    CHECK(describe(sum).find("safety            PASS") != std::string::npos);
}
