#include "safesmc/sim.hpp"

#include "safesmc/safeguard.hpp"
#include "safesmc/smc.hpp"

#include <cmath>
#include <stdexcept>

namespace safesmc {

const char* to_string(Integrator integrator) {
    return integrator == Integrator::Euler ? "euler" : "rk4";
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "completed";
        case RunStatus::InfeasibleSafeguard: return "infeasible-safeguard";
        case RunStatus::DegenerateDenominator: return "degenerate-denominator";
        case RunStatus::ChannelDegenerate: return "channel-degenerate";
        case RunStatus::NonFiniteState: return "non-finite-state";
    }
    return "?";
}

void SimConfig::check() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("SimConfig: t_end must be >= 0");
    if (record_stride == 0) throw std::invalid_argument("SimConfig: record_stride must be >= 1");
}

std::size_t SimConfig::steps() const {
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

namespace {

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && (a.size() == 0 || a == b); }

struct Controls {
    Vector s;
    Vector u_smc;
    double u_s = 0.0;
    Vector u;
};

Controls compute_controls(const Scenario& sc, const ControllerState& state, const Vector& x, bool safeguard_enabled) {
    const auto unsafe = unsafe_control(sc.plant, sc.sliding, x);
    Controls out{unsafe.s, unsafe.u_smc, 0.0, unsafe.u_smc};
    if (state.fallback) {
        out.u = Vector::Zero(unsafe.u_smc.size());
        return out;
    }
    if (safeguard_enabled && state.mode == Mode::Active && state.channel) {
        const auto coeffs = coefficients(x, state.z, out.s, out.u_smc, sc.plant, sc.sliding, sc.safety, sc.params);
        out.u_s = safeguard_control(coeffs, *state.channel, out.s, state.mode, sc.safety, sc.params);
        out.u(static_cast<Eigen::Index>(*state.channel)) += out.u_s;
    }
    return out;
}

TrajectoryRecord make_record(const Scenario& sc, const Controls& c, const Vector& x, double z, double t,
                             Mode mode) {
    TrajectoryRecord r;
    r.t = t;
    r.x = x;
    r.z = z;
    r.s = c.s;
    r.u_smc = c.u_smc;
    r.u_s = c.u_s;
    r.u = c.u;
    r.h = sc.safety.h(x);
    r.h_upsilon = upsilon(z, sc.params) * r.h;
    r.V_smc = 0.5 * c.s.squaredNorm();
    r.V_z = 0.5 * sc.params.c_z * std::abs(z);
    r.V_total = r.V_smc + r.V_z;
    r.mode = mode;
    return r;
}

struct Derivative {
    Vector x;
    double z = 0.0;
};

// Coupled right-hand side with the controls held fixed.
Derivative rhs(const Scenario& sc, const Vector& u, double u_s, std::size_t j, double t, const Vector& x, double z) {
    const auto& plant = sc.plant;
    const auto m = static_cast<Eigen::Index>(plant.m());
    const auto p = static_cast<Eigen::Index>(plant.p);

    Derivative d;
    d.x.resize(x.size());
    if (m > 0) d.x.head(m) = plant.drift_a(x);
    const Vector gain = plant.G_true(t, x);
    d.x.tail(p) = plant.drift_b(x) + gain.asDiagonal() * (plant.E(x) * u) + plant.delta_true(t, x);

    const Vector s = sliding_variable(sc.sliding, plant.eta(x), plant.zeta(x));
    d.z = z_derivative(x, s, z, u_s, j, plant, sc.sliding, sc.params);
    return d;
}

}  // namespace

bool identical(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    return a.t == b.t && same(a.x, b.x) && a.z == b.z && same(a.s, b.s) && same(a.u_smc, b.u_smc) &&
           a.u_s == b.u_s && same(a.u, b.u) && a.h == b.h && a.h_upsilon == b.h_upsilon && a.V_smc == b.V_smc &&
           a.V_z == b.V_z && a.V_total == b.V_total && a.mode == b.mode && a.reset_flag == b.reset_flag;
}

bool identical(const std::vector<TrajectoryRecord>& a, const std::vector<TrajectoryRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!identical(a[i], b[i])) return false;
    return true;
}

StepResult step(const Scenario& sc, const ControllerState& state, const Vector& x, double t, double dt,
                Integrator integrator, bool safeguard_enabled) {
    const Controls c = compute_controls(sc, state, x, safeguard_enabled);
    const std::size_t j = state.channel.value_or(0);
    const double z = state.z;

    StepResult out;
    out.record = make_record(sc, c, x, z, t, state.mode);

    const Derivative k1 = rhs(sc, c.u, c.u_s, j, t, x, z);
    if (integrator == Integrator::Euler) {
        out.x = x + dt * k1.x;
        out.z = z + dt * k1.z;
    } else {
        const double half = 0.5 * dt;
        const Derivative k2 = rhs(sc, c.u, c.u_s, j, t + half, x + half * k1.x, z + half * k1.z);
        const Derivative k3 = rhs(sc, c.u, c.u_s, j, t + half, x + half * k2.x, z + half * k2.z);
        const Derivative k4 = rhs(sc, c.u, c.u_s, j, t + dt, x + dt * k3.x, z + dt * k3.z);
        out.x = x + (dt / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        out.z = z + (dt / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    }

    // z may not step across 0 while its start-of-step derivative points at 0.
    if (z != 0.0 && z * k1.z < 0.0 && (out.z == 0.0 || sign(out.z) != sign(z))) out.z = 0.0;

    if (!out.x.allFinite()) throw NonFiniteState(t + dt, "x");
    if (!std::isfinite(out.z)) throw NonFiniteState(t + dt, "z");
    return out;
}

namespace {

// Time where f crosses zero between (t0, f0 > 0) and (t1, f1 <= 0).
double crossing(double t0, double f0, double t1, double f1) {
    const double span = f0 - f1;
    if (!(span > 0.0)) return t1;
    return t0 + (f0 / span) * (t1 - t0);
}

}  // namespace

RunResult run(const Scenario& sc, const SimConfig& config, const RunOptions& options) {
    config.check();
    auto report = validate_scenario(sc, config.x0);
    if (!report.valid()) throw InvalidScenario(std::move(report));

    RunResult result;
    ControllerState state;
    state.z = sc.params.z0;
    if (sc.params.channel.kind != ChannelRuleKind::ArgmaxAtActivation)
        state.channel = select_channel(sc.params.channel, config.x0, nullptr);

    const std::size_t n_steps = config.steps();
    result.records.reserve(n_steps / config.record_stride + 2);
    result.metrics.steps = n_steps;

    Vector x = config.x0;
    double prev_h = 0.0, prev_snorm = 0.0, prev_sinf = 0.0;
    Vector prev_u;
    auto& ev = result.events;
    ev.min_h = sc.safety.h(x);

    auto abort = [&](RunStatus status, const std::string& message, double t) {
        result.status = status;
        result.message = message;
        if (status == RunStatus::InfeasibleSafeguard || status == RunStatus::DegenerateDenominator) ev.infeasible_at = t;
    };

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        const Vector s = sliding_variable(sc.sliding, sc.plant.eta(x), sc.plant.zeta(x));
        const double h = sc.safety.h(x);
        const double snorm = s.norm();
        const double sinf = s.cwiseAbs().maxCoeff();

        if (state.mode == Mode::Done && std::abs(state.z) < 1e-12) state.z = 0.0;

        const Mode before = state.mode;
        state = update_mode(state, x, s, sc.safety, t);
        if (before == Mode::Pre && state.mode != Mode::Pre)
            ev.t1 = k == 0 ? 0.0 : crossing(t - config.dt, prev_h - sc.safety.h_bar, t, h - sc.safety.h_bar);
        if (before != Mode::Done && state.mode == Mode::Done)
            ev.t_omega = k == 0 ? 0.0
                                : crossing(t - config.dt, prev_snorm - sc.safety.omega_radius, t,
                                           snorm - sc.safety.omega_radius);
        if (!ev.reach_time && sinf < kReachThreshold)
            ev.reach_time = k == 0 ? 0.0 : crossing(t - config.dt, prev_sinf - kReachThreshold, t, sinf - kReachThreshold);
        ev.min_h = std::min(ev.min_h, h);

        bool reset = false;
        if (options.safeguard_enabled) {
            auto outcome = maybe_reset(state, x, sc.safety, sc.params);
            state = outcome.state;
            reset = outcome.reset;
            if (reset) ev.reset_times.push_back(t);
        }
        if (state.fallback && h > sc.safety.h_bar) state.fallback = false;

        if (options.safeguard_enabled && state.mode == Mode::Active && !state.channel) {
            try {
                const auto unsafe = unsafe_control(sc.plant, sc.sliding, x);
                const auto coeffs =
                    coefficients(x, state.z, unsafe.s, unsafe.u_smc, sc.plant, sc.sliding, sc.safety, sc.params);
                state.channel = select_channel(sc.params.channel, config.x0, &coeffs);
            } catch (const ChannelDegenerate& e) {
                abort(RunStatus::ChannelDegenerate, e.what(), t);
                break;
            }
        }

        StepResult next;
        try {
            try {
                next = step(sc, state, x, t, config.dt, config.integrator, options.safeguard_enabled);
            } catch (const Error& e) {
                const bool safeguard_failure = dynamic_cast<const InfeasibleSafeguard*>(&e) != nullptr ||
                                               dynamic_cast<const DegenerateDenominator*>(&e) != nullptr;
                if (!safeguard_failure || !options.remark3_fallback) throw;
                state.fallback = true;
                ev.fallback_times.push_back(t);
                next = step(sc, state, x, t, config.dt, config.integrator, options.safeguard_enabled);
            }
        } catch (const InfeasibleSafeguard& e) {
            abort(RunStatus::InfeasibleSafeguard, std::string(e.what()) + " at t=" + std::to_string(t), t);
            break;
        } catch (const DegenerateDenominator& e) {
            abort(RunStatus::DegenerateDenominator, std::string(e.what()) + " at t=" + std::to_string(t), t);
            break;
        } catch (const NonFiniteState& e) {
            // The start-of-step record is still valid.
            next.record.t = t;
            abort(RunStatus::NonFiniteState, e.what(), e.t);
            break;
        }

        next.record.reset_flag = reset;
        if (k % config.record_stride == 0 || k == n_steps) result.records.push_back(next.record);
        if (k == n_steps) break;

        result.metrics.us_l1 += std::abs(next.record.u_s) * config.dt;
        if (prev_u.size() == next.record.u.size()) result.metrics.control_tv += (next.record.u - prev_u).lpNorm<1>();
        prev_u = next.record.u;

        x = next.x;
        state.z = next.z;
        prev_h = h;
        prev_snorm = snorm;
        prev_sinf = sinf;
    }

    result.channel = state.channel;
    result.final_x = x;
    result.final_z = state.z;
    return result;
}

EnergySeries energy_series(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw EmptyTrajectory();
    EnergySeries out;
    out.V_smc.reserve(records.size());
    out.V_z.reserve(records.size());
    out.V_total.reserve(records.size());
    for (const auto& r : records) {
        out.V_smc.push_back(r.V_smc);
        out.V_z.push_back(r.V_z);
        out.V_total.push_back(r.V_total);
    }
    return out;
}

}  // namespace safesmc
