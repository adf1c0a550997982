#pragma once

// Inner (possibly unsafe) sliding mode controller.

#include "safesmc/model.hpp"

namespace safesmc {

/// s = M (zeta - phi(eta)).
Vector sliding_variable(const SlidingSpec& sliding, const Vector& eta, const Vector& zeta);

/// Elementwise sign(s_i) or sat(s_i, eps), sign(0) = 1.
Vector switching_term(const Vector& s, const Switching& switching);

/// Certain part of the input-to-s-dot gain, M * G_hat(x) * E(x).
Matrix input_to_sliding_gain(const RegularFormPlant& plant, const SlidingSpec& sliding, const Vector& x);

struct UnsafeControlOutput {
    Vector u_smc;
    Vector s;
    double beta = 0.0;
    Vector v;  // reaching term, v_i = -beta * sigma(s_i)
};

/// u_smc = E^-1 ( -G_hat^-1 (f_b - dphi/deta f_a) + M^-1 v ) with
/// beta = rho(x) + beta0. Throws SingularMatrix when E, G_hat or M is
/// numerically singular at x.
UnsafeControlOutput unsafe_control(const RegularFormPlant& plant, const SlidingSpec& sliding, const Vector& x);

/// Upper bound sqrt(2 V(0)) / mu on the time to reach (s, z) = (0, 0), with
/// V(0) = |s0|^2 / 2 + (c_z / 2)|z0| and mu = min(g0 beta0, lambda / sqrt(c_z)).
double reaching_time_bound(const Vector& s0, double z0, double g0, double beta0, double lambda, double c_z);

}  // namespace safesmc
