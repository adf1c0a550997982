#pragma once

// Built-in planar mobile robot, x' = G(t, x) u + delta(t, x), with a circular
// obstacle barrier. Already in regular form with m = 0, so s = M x.

#include "safesmc/model.hpp"

#include <cstddef>
#include <string>

namespace safesmc::robot {

enum class Uncertainty {
    Paper,  // G = diag(1 + 0.5 sin t, 1 + 0.5 e^-t cos t), delta = [4 cos t, 3 sin x2]
    None,   // G = I, delta = 0
};

const char* to_string(Uncertainty u);
Uncertainty parse_uncertainty(const std::string& text);  // throws std::invalid_argument

RegularFormPlant make_plant(Uncertainty uncertainty);

struct Obstacle {
    double x1c = 5.0;
    double x2c = 3.0;
    double radius = 2.0;

    bool operator==(const Obstacle&) const = default;
};

/// h = (x1 - x1c)^2 + (x2 - x2c)^2 - l^2 with a linear class-K alpha.
SafetySpec make_safety(const Obstacle& obstacle, double alpha_gain, double h_bar, double omega_radius);

/// Channel 2 when x2(0) >= x1(0) - offset, otherwise channel 1 (0-based result).
ChannelRule diagonal_channel_rule(double offset);

}  // namespace safesmc::robot
