#include "safesmc/robot.hpp"

#include <cmath>
#include <stdexcept>

namespace safesmc::robot {

const char* to_string(Uncertainty u) { return u == Uncertainty::Paper ? "paper" : "none"; }

Uncertainty parse_uncertainty(const std::string& text) {
    if (text == "paper") return Uncertainty::Paper;
    if (text == "none") return Uncertainty::None;
    throw std::invalid_argument("unknown uncertainty model '" + text + "' (expected paper or none)");
}

RegularFormPlant make_plant(Uncertainty uncertainty) {
    RegularFormPlant plant;
    plant.n = 2;
    plant.p = 2;
    plant.f_b = [](const Vector&, const Vector&) { return Vector::Zero(2).eval(); };
    plant.E = [](const Vector&) { return Matrix::Identity(2, 2).eval(); };
    plant.G_hat = [](const Vector&) { return Matrix::Identity(2, 2).eval(); };

    if (uncertainty == Uncertainty::None) {
        plant.g0 = 1.0;
        plant.rho1 = [](const Vector&) { return 0.0; };
        plant.rho2 = [](const Vector&) { return 0.0; };
        plant.rho = [](const Vector&) { return 0.0; };
        plant.G_true = [](double, const Vector&) { return Vector::Ones(2).eval(); };
        plant.delta_true = [](double, const Vector&) { return Vector::Zero(2).eval(); };
        return plant;
    }

    // |theta_i| <= 0.5, |delta_1| <= 4, |delta_2| <= 3.
    constexpr double g0 = 0.5;
    plant.g0 = g0;
    plant.rho1 = [](const Vector&) { return 4.0; };
    plant.rho2 = [](const Vector&) { return 0.5; };
    plant.rho = [](const Vector&) { return 4.0 / g0; };
    plant.G_true = [](double t, const Vector&) {
        Vector g(2);
        g << 1.0 + 0.5 * std::sin(t), 1.0 + 0.5 * std::exp(-t) * std::cos(t);
        return g;
    };
    plant.delta_true = [](double t, const Vector& x) {
        Vector d(2);
        d << 4.0 * std::cos(t), 3.0 * std::sin(x(1));
        return d;
    };
    return plant;
}

SafetySpec make_safety(const Obstacle& ob, double alpha_gain, double h_bar, double omega_radius) {
    SafetySpec safety;
    safety.h = [ob](const Vector& x) {
        const double d1 = x(0) - ob.x1c, d2 = x(1) - ob.x2c;
        return d1 * d1 + d2 * d2 - ob.radius * ob.radius;
    };
    safety.grad_h = [ob](const Vector& x) {
        RowVector g(2);
        g << 2.0 * (x(0) - ob.x1c), 2.0 * (x(1) - ob.x2c);
        return g;
    };
    safety.alpha = SafetySpec::linear_alpha(alpha_gain);
    safety.h_bar = h_bar;
    safety.omega_radius = omega_radius;
    return safety;
}

ChannelRule diagonal_channel_rule(double offset) {
    return ChannelRule::initial_condition(
        [offset](const Vector& x0) -> std::size_t { return x0(1) >= x0(0) - offset ? 1 : 0; });
}

}  // namespace safesmc::robot
