#include "safesmc/safeguard.hpp"

#include "safesmc/smc.hpp"

#include <cmath>

namespace safesmc {

namespace {

constexpr double kDegenerate = 1e-9;

RowVector barrier_input_gradient(const Vector& x, const RegularFormPlant& plant, const SafetySpec& safety) {
    const RowVector grad = safety.grad_h(x);
    return grad.tail(static_cast<Eigen::Index>(plant.p));
}

}  // namespace

double upsilon(double z, const SafeguardParams& params) {
    return params.h1 + params.h2 * std::atan(params.h3 * z);
}

double z_sign(double z, const SafeguardParams& params) {
    return params.smooth_z_sign ? sat(z, params.z_sign_epsilon) : sign(z);
}

double psi(const Vector& x, double z, const SafetySpec& safety, const SafeguardParams& params) {
    const double denom = params.c_z * (1.0 + params.h3 * params.h3 * z * z);
    return params.h2 * params.h3 * safety.h(x) * z_sign(z, params) / denom;
}

Gammas gammas(const Vector& x, const RegularFormPlant& plant, const SafetySpec& safety) {
    const double grad_norm = barrier_input_gradient(x, plant, safety).cwiseAbs().maxCoeff();
    return {grad_norm * plant.rho1(x), grad_norm * induced_inf_norm(plant.E(x)) * plant.rho2(x)};
}

SafeguardCoefficients coefficients(const Vector& x, double z, const Vector& s, const Vector& u_smc,
                                   const RegularFormPlant& plant, const SlidingSpec& sliding,
                                   const SafetySpec& safety, const SafeguardParams& params) {
    SafeguardCoefficients out;
    out.upsilon = upsilon(z, params);
    out.psi = psi(x, z, safety, params);
    const auto g = gammas(x, plant, safety);
    out.gamma1 = g.gamma1;
    out.gamma2 = g.gamma2;

    const Matrix e = plant.E(x);
    const RowVector lie_input = barrier_input_gradient(x, plant, safety) * plant.G_hat(x) * e;
    const Matrix gain = input_to_sliding_gain(plant, sliding, x);

    // Coupling of u_s on channel i into V_smc, matched to the z-dynamics.
    const Vector coupling = s.cwiseProduct(gain.diagonal());
    out.a = -2.0 * out.psi * coupling + out.upsilon * lie_input.transpose();

    const double rho2 = plant.rho2(x);
    out.b = 2.0 * s.cwiseAbs().maxCoeff() * induced_inf_norm(e) * out.psi * rho2 + out.upsilon * out.gamma2;

    // L_f h through the regular-form drift [f_a; f_b].
    const RowVector grad = safety.grad_h(x);
    const auto m = static_cast<Eigen::Index>(plant.m());
    double lie_drift = grad.tail(static_cast<Eigen::Index>(plant.p)).dot(plant.drift_b(x));
    if (m > 0) lie_drift += grad.head(m).dot(plant.drift_a(x));

    const double h = safety.h(x);
    out.c = -safety.alpha(out.upsilon * h) + 2.0 * params.lambda * std::sqrt(std::abs(z)) * out.psi -
            out.upsilon * (lie_drift + lie_input.dot(u_smc) - out.gamma1);
    return out;
}

std::size_t select_channel(const ChannelRule& rule, const Vector& x0, const SafeguardCoefficients* at_activation) {
    switch (rule.kind) {
        case ChannelRuleKind::Fixed:
            return rule.fixed;
        case ChannelRuleKind::InitialCondition:
            return rule.predicate(x0);
        case ChannelRuleKind::ArgmaxAtActivation: {
            if (at_activation == nullptr) throw std::logic_error("argmax channel rule needs activation coefficients");
            Eigen::Index best = 0;
            const double largest = at_activation->a.cwiseAbs().maxCoeff(&best);
            if (largest < kDegenerate) throw ChannelDegenerate("every |a_i| is below 1e-9 at activation");
            return static_cast<std::size_t>(best);
        }
    }
    return rule.fixed;
}

double safeguard_control(const SafeguardCoefficients& coeffs, std::size_t j, const Vector& s, Mode mode,
                         const SafetySpec& safety, const SafeguardParams& params) {
    if (mode != Mode::Active) return 0.0;
    if (s.norm() < safety.omega_radius) return 0.0;
    if (coeffs.c <= 0.0) return 0.0;

    const double a_j = coeffs.a(static_cast<Eigen::Index>(j));
    const double margin = std::abs(a_j) - coeffs.b;
    const double authority = params.authority_tolerance * coeffs.a.cwiseAbs().maxCoeff();
    if (margin <= authority) {
        throw InfeasibleSafeguard(a_j, coeffs.b, coeffs.c,
                                  "no u_s on channel " + std::to_string(j + 1) + " satisfies a_j u - b|u| >= c (a_j=" +
                                      std::to_string(a_j) + ", b=" + std::to_string(coeffs.b) +
                                      ", c=" + std::to_string(coeffs.c) + ")");
    }
    if (margin < kDegenerate) throw DegenerateDenominator(margin);

    const double u_s = sign(a_j) * coeffs.c / margin;
    if (params.max_abs_us && std::abs(u_s) > *params.max_abs_us) {
        throw InfeasibleSafeguard(a_j, coeffs.b, coeffs.c,
                                  "required |u_s| = " + std::to_string(std::abs(u_s)) + " exceeds the bound " +
                                      std::to_string(*params.max_abs_us));
    }
    return u_s;
}

double z_derivative(const Vector& x, const Vector& s, double z, double u_s, std::size_t j,
                    const RegularFormPlant& plant, const SlidingSpec& sliding, const SafeguardParams& params) {
    double drive = params.lambda * std::sqrt(std::abs(z));
    if (u_s != 0.0) {
        const auto jj = static_cast<Eigen::Index>(j);
        const Matrix gain = input_to_sliding_gain(plant, sliding, x);
        const double column_norm = plant.E(x).col(jj).cwiseAbs().maxCoeff();
        drive += s(jj) * gain(jj, jj) * u_s + std::abs(s(jj)) * column_norm * plant.rho2(x) * std::abs(u_s);
    }
    return -2.0 * drive / params.c_z * z_sign(z, params);
}

ControllerState update_mode(ControllerState state, const Vector& x, const Vector& s, const SafetySpec& safety,
                            double t) {
    if (state.mode == Mode::Pre && safety.h(x) <= safety.h_bar) {
        state.mode = Mode::Active;
        state.t1 = t;
    }
    if (state.mode == Mode::Active && s.norm() < safety.omega_radius) state.mode = Mode::Done;
    return state;
}

ResetOutcome maybe_reset(ControllerState state, const Vector& x, const SafetySpec& safety,
                         const SafeguardParams& params) {
    if (state.mode != Mode::Active || !params.z_reset_threshold) return {state, false};
    if (std::abs(state.z) < *params.z_reset_threshold && safety.h(x) <= safety.h_bar) {
        state.z = params.z0;
        ++state.reset_count;
        return {state, true};
    }
    return {state, false};
}

}  // namespace safesmc
