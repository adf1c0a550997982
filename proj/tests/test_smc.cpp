#include "safesmc/sim.hpp"
#include "safesmc/smc.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace safesmc;
using testing::vec;
using Catch::Approx;

TEST_CASE("sliding variable") {
    SlidingSpec identity;
    CHECK(sliding_variable(identity, Vector(0), vec({7, 7})) == vec({7, 7}));

    SlidingSpec alt;
    alt.M = Matrix{{1, -1}, {1, 1}};
    CHECK(sliding_variable(alt, Vector(0), vec({0, 6})) == vec({-6, 6}));

    SlidingSpec with_phi;
    with_phi.M = Matrix{{2, 1}, {0, 3}};
    with_phi.phi = [](const Vector& eta) { return vec({eta(0) * eta(0), -eta(0)}); };
    const Vector eta = vec({1.5});
    CHECK(sliding_variable(with_phi, eta, with_phi.phi(eta)).isZero(0.0));
}

TEST_CASE("switching term") {
    CHECK(switching_term(vec({7, -2}), Switching::sign()) == vec({1, -1}));
    CHECK(switching_term(vec({0}), Switching::sign()) == vec({1}));
    CHECK(switching_term(vec({0.3, 2, -0.25}), Switching::sat(0.5)).isApprox(vec({0.6, 1, -0.5})));

    for (double s : {-3.0, -0.2, 1e-9, 0.4, 9.0})
        for (const auto& sw : {Switching::sign(), Switching::sat(0.5)})
            CHECK(switching_term(vec({-s}), sw)(0) == -switching_term(vec({s}), sw)(0));
}

TEST_CASE("unsafe control on the section V robot") {
    const auto sc = testing::section_v();
    const auto out = unsafe_control(sc.plant, sc.sliding, vec({7, 7}));
    CHECK(out.u_smc.isApprox(vec({-8.1, -8.1})));
    CHECK(out.beta == Approx(8.1));
    CHECK(out.beta >= sc.plant.rho(vec({7, 7})) + sc.sliding.beta0);
    CHECK(out.s == vec({7, 7}));
}

TEST_CASE("unsafe control at s = 0 follows sign(0) = 1 per channel") {
    const auto sc = testing::section_v();
    const auto out = unsafe_control(sc.plant, sc.sliding, vec({0, 0}));
    CHECK(out.u_smc.isApprox(vec({-8.1, -8.1})));
}

TEST_CASE("unsafe control on the alternative manifold") {
    const auto sc = testing::demo("robot-altmanifold").scenario;
    const auto out = unsafe_control(sc.plant, sc.sliding, vec({0, 6}));
    CHECK(out.v.isApprox(vec({0.1, -0.1})));
    // M u_smc must equal -0.1 sign(s) with s = [-6, 6].
    CHECK(out.u_smc.isApprox(vec({0, -0.1})));
    CHECK((sc.sliding.M * out.u_smc).isApprox(vec({0.1, -0.1})));
}

TEST_CASE("reaching term scales with beta") {
    auto sc = testing::section_v();
    const auto x = vec({3, -2});
    const auto base = unsafe_control(sc.plant, sc.sliding, x);
    sc.sliding.beta0 *= 2.0;
    const auto doubled = unsafe_control(sc.plant, sc.sliding, x);
    CHECK(doubled.v.isApprox(base.v * (doubled.beta / base.beta)));
}

TEST_CASE("singular E is reported") {
    auto sc = testing::section_v();
    sc.plant.E = [](const Vector&) { return Matrix{{1, 1}, {1, 1}}; };
    try {
        unsafe_control(sc.plant, sc.sliding, vec({7, 7}));
        FAIL("expected SingularMatrix");
    } catch (const SingularMatrix& e) {
        CHECK(e.which() == "E");
    }
}

TEST_CASE("reaching time bound") {
    CHECK(reaching_time_bound(vec({0, 0}), 0.0, 0.5, 0.1, 1.0, 2.0) == 0.0);
    CHECK(reaching_time_bound(vec({7, 7}), -10.0, 0.5, 0.1, 1.0, 2.0) == Approx(217.2556098240043).epsilon(1e-12));
    CHECK(reaching_time_bound(vec({3, 4}), 0.0, 1.0, 1.0, 2.0, 1.0) == Approx(5.0));
}

TEST_CASE("reaching-law inequality holds on the baseline run") {
    auto built = testing::demo("robot-s1a");
    built.options.safeguard_enabled = false;
    built.sim.t_end = 1.5;
    const auto result = run(built.scenario, built.sim, built.options);
    REQUIRE(result.status == RunStatus::Completed);
    const auto& r = result.records;

    double max_ds = 0.0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) max_ds = std::max(max_ds, (r[k + 1].s - r[k].s).cwiseAbs().maxCoeff());
    const double band = 3.0 * max_ds;
    const double g0b0 = built.scenario.plant.g0 * built.scenario.sliding.beta0;
    std::size_t checked = 0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        if (r[k].s.cwiseAbs().minCoeff() <= band || r[k + 1].s.cwiseAbs().minCoeff() <= band) continue;
        const double dt = r[k + 1].t - r[k].t;
        const double rate = (r[k + 1].V_smc - r[k].V_smc) / dt;
        const double bound = -g0b0 * r[k].s.lpNorm<1>();
        // tol = C dt with C covering the curvature of V_smc along a reaching arc.
        if (rate > bound + 1e3 * dt) FAIL("t=" << r[k].t << " rate " << rate << " bound " << bound);
        ++checked;
    }
    CHECK(checked > 1000);
    REQUIRE(result.events.reach_time);
    CHECK(*result.events.reach_time <= reaching_time_bound(vec({7, 7}), -10.0, 0.5, 0.1, 1.0, 2.0));
}
