#include "safesmc/sim.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace safesmc;
using testing::vec;
using Catch::Approx;

namespace {

// Hand evaluation of the robot dynamics at t = 0, x = [7, 7], u = [-8.1, -8.1].
constexpr double kXdot0[2] = {-4.1, -10.17904020384363};

RunResult run_demo(const std::string& name, double t_end = -1.0, double dt = -1.0) {
    auto built = testing::demo(name);
    if (t_end >= 0.0) built.sim.t_end = t_end;
    if (dt > 0.0) built.sim.dt = dt;
    return run(built.scenario, built.sim, built.options);
}

}  // namespace

TEST_CASE("one Euler step of the uncertain robot") {
    const auto sc = testing::section_v();
    ControllerState st;
    st.z = -10.0;
    st.channel = 1;
    const auto out = step(sc, st, vec({7, 7}), 0.0, 1e-4, Integrator::Euler);
    CHECK(out.record.u.isApprox(vec({-8.1, -8.1})));
    CHECK(out.record.u_s == 0.0);
    CHECK(out.x(0) == Approx(7.0 + 1e-4 * kXdot0[0]).epsilon(1e-15));
    CHECK(out.x(1) == Approx(7.0 + 1e-4 * kXdot0[1]).epsilon(1e-15));
    CHECK(out.z == Approx(-10.0 + 1e-4 * std::sqrt(10.0)).epsilon(1e-15));
    CHECK(out.record.t == 0.0);
    CHECK(out.record.x == vec({7, 7}));
}

TEST_CASE("zero dynamics leave x unchanged under both integrators") {
    auto sc = testing::demo("robot-incompatible").scenario;
    sc.plant.G_true = [](double, const Vector&) { return Vector::Zero(2).eval(); };
    ControllerState st;
    st.z = -10.0;
    st.channel = 0;
    for (auto integrator : {Integrator::Euler, Integrator::Rk4}) {
        const auto x = vec({0.3, 5.0});
        const auto out = step(sc, st, x, 0.0, 1e-3, integrator);
        CHECK(out.x == x);
    }
}

TEST_CASE("zero horizon logs a single record") {
    const auto r = run_demo("robot-s1a", 0.0);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].t == 0.0);
    CHECK_FALSE(r.events.t1);
    CHECK(r.events.reset_times.empty());
    CHECK_FALSE(r.events.t_omega);
    CHECK_FALSE(r.events.infeasible_at);
}

TEST_CASE("energy series") {
    const auto r = run_demo("robot-s1a", 1.0);
    const auto e = energy_series(r.records);
    CHECK(e.V_smc[0] == Approx(49.0));
    CHECK(e.V_z[0] == Approx(10.0));
    CHECK(e.V_total[0] == Approx(59.0));
    for (std::size_t k = 0; k < r.records.size(); ++k) {
        if (e.V_total[k] != e.V_smc[k] + e.V_z[k]) FAIL("V_total mismatch at " << k);
        if (r.records[k].reset_flag && e.V_z[k] != Approx(10.0)) FAIL("V_z after reset " << e.V_z[k]);
    }

    TrajectoryRecord zero;
    zero.s = vec({0, 0});
    const auto z = energy_series({zero});
    CHECK(z.V_total[0] == 0.0);
    CHECK_THROWS_AS(energy_series({}), EmptyTrajectory);
}

TEST_CASE("robot-s1a event narrative") {
    const auto r = run_demo("robot-s1a");
    REQUIRE(r.status == RunStatus::Completed);
    const auto& ev = r.events;
    REQUIRE(ev.t1);
    REQUIRE_FALSE(ev.reset_times.empty());
    REQUIRE(ev.t_omega);
    CHECK(*ev.t1 <= ev.reset_times.front());
    CHECK(ev.reset_times.back() <= *ev.t_omega);
    CHECK(std::is_sorted(ev.reset_times.begin(), ev.reset_times.end()));
    CHECK(ev.min_h >= 0.0);
    CHECK(r.channel == std::size_t{1});

    // PRE* ACTIVE* DONE*
    int transitions = 0;
    for (std::size_t k = 1; k < r.records.size(); ++k) {
        const auto a = r.records[k - 1].mode, b = r.records[k].mode;
        if (a == b) continue;
        ++transitions;
        const bool forward = (a == Mode::Pre && b == Mode::Active) || (a == Mode::Active && b == Mode::Done);
        if (!forward) FAIL("backward transition at t=" << r.records[k].t);
    }
    CHECK(transitions == 2);

    // Energy drains from z while the safeguard acts, until the first reset.
    // Once z reaches the clamp it chatters within one step of 0 (sign(0) = 1),
    // so samples inside that band are skipped.
    const auto in_window = [&](std::size_t k) {
        const auto& a = r.records[k];
        return a.t >= *ev.t1 && a.t + 1e-12 < ev.reset_times.front() && !r.records[k + 1].reset_flag;
    };
    double max_dz = 0.0;
    for (std::size_t k = 0; k + 1 < r.records.size(); ++k)
        if (in_window(k)) max_dz = std::max(max_dz, std::abs(r.records[k + 1].z - r.records[k].z));
    int drained = 0;
    for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
        const auto& a = r.records[k];
        if (!in_window(k) || a.u_s == 0.0 || a.z >= -3.0 * max_dz) continue;
        ++drained;
        if (r.records[k + 1].V_z > a.V_z) FAIL("V_z grew at t=" << a.t);
    }
    CHECK(drained > 10);

    // z never steps across 0 except through a reset.
    for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
        if (r.records[k + 1].reset_flag) continue;
        if (r.records[k].z * r.records[k + 1].z < 0.0) FAIL("z crossed 0 at t=" << r.records[k].t);
    }
}

TEST_CASE("runs are deterministic") {
    const auto a = run_demo("robot-s1a", 1.0);
    const auto b = run_demo("robot-s1a", 1.0);
    CHECK(identical(a.records, b.records));
    CHECK(a.events.reset_times == b.events.reset_times);
    CHECK(a.events.t_omega == b.events.t_omega);
}

TEST_CASE("safeguard that never engages matches the plain controller") {
    auto built = testing::demo("robot-s1a");
    built.sim.x0 = vec({-4, 4});  // approach from the far side of the obstacle
    built.sim.t_end = 2.0;
    const auto guarded = run(built.scenario, built.sim, built.options);
    REQUIRE_FALSE(guarded.events.t1);

    built.options.safeguard_enabled = false;
    const auto plain = run(built.scenario, built.sim, built.options);
    CHECK(identical(guarded.records, plain.records));
}

TEST_CASE("baseline without safeguard enters the obstacle") {
    auto built = testing::demo("robot-s1a");
    built.options.safeguard_enabled = false;
    const auto r = run(built.scenario, built.sim, built.options);
    CHECK(r.events.min_h < 0.0);
    for (const auto& rec : r.records) {
        if (rec.u_s != 0.0) FAIL("u_s logged with the safeguard off");
        if (rec.reset_flag) FAIL("reset logged with the safeguard off");
    }
}

TEST_CASE("halving dt barely moves min_h") {
    const auto coarse = run_demo("robot-s1a", 5.0, 2e-4);
    const auto fine = run_demo("robot-s1a", 5.0, 1e-4);
    CHECK(std::abs(coarse.events.min_h - fine.events.min_h) < 1e-2);
}

TEST_CASE("infeasible safeguard aborts with a partial log") {
    const auto r = run_demo("robot-incompatible");
    CHECK(r.status == RunStatus::InfeasibleSafeguard);
    REQUIRE(r.events.infeasible_at);
    CHECK(*r.events.infeasible_at > 10.0);
    CHECK(*r.events.infeasible_at < 20.0);
    CHECK(r.records.back().t <= *r.events.infeasible_at);
    CHECK(r.final_x(0) == Approx(0.0).margin(1e-9));
    CHECK(r.message.find("channel 1") != std::string::npos);
}

TEST_CASE("fallback suppresses the control instead of aborting") {
    auto built = testing::demo("robot-incompatible");
    built.options.remark3_fallback = true;
    const auto r = run(built.scenario, built.sim, built.options);
    CHECK(r.status == RunStatus::Completed);
    REQUIRE_FALSE(r.events.fallback_times.empty());
    CHECK(r.events.fallback_times.front() == Approx(14.9).margin(0.05));
    CHECK(r.events.min_h >= 0.0);
    CHECK(r.records.back().u.isZero(0.0));
}

TEST_CASE("non-finite state is reported") {
    auto built = testing::demo("robot-s1a");
    built.sim.t_end = 0.01;
    built.scenario.plant.delta_true = [](double t, const Vector&) {
        return t > 0.005 ? vec({std::numeric_limits<double>::quiet_NaN(), 0.0}) : vec({0.0, 0.0});
    };
    const auto r = run(built.scenario, built.sim, built.options);
    CHECK(r.status == RunStatus::NonFiniteState);
    CHECK(r.message.find("non-finite x") != std::string::npos);
}

TEST_CASE("invalid scenarios are refused up front") {
    auto built = testing::demo("robot-s1a");
    built.scenario.params.h1 = 0.3;
    CHECK_THROWS_AS(run(built.scenario, built.sim, built.options), InvalidScenario);

    built = testing::demo("robot-s1a");
    built.sim.dt = 0.0;
    CHECK_THROWS_AS(run(built.scenario, built.sim, built.options), std::invalid_argument);
}

TEST_CASE("record stride keeps every k-th step and the last") {
    auto built = testing::demo("robot-s1a");
    built.sim.t_end = 0.1;
    built.sim.record_stride = 7;
    const auto r = run(built.scenario, built.sim, built.options);
    REQUIRE(r.records.size() == 1000 / 7 + 2);
    CHECK(r.records[1].t == 7 * 1e-4);
    CHECK(r.records.back().t == Approx(0.1));
}
