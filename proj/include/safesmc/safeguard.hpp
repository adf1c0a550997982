#pragma once

// Outer safeguarding loop: the barrier scaling Upsilon(z), the coefficients of
// the single-channel safety inequality a_j u - b |u| >= c, its closed-form
// solution, the augmented-state dynamics, and the mode machine.

#include "safesmc/model.hpp"

#include <cstddef>

namespace safesmc {

struct SafeguardCoefficients {
    Vector a;  // one entry per input channel
    double b = 0.0;
    double c = 0.0;
    double psi = 0.0;
    double upsilon = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

struct Gammas {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

/// h1 + h2 atan(h3 z), always inside (h1 - pi h2 / 2, h1 + pi h2 / 2).
double upsilon(double z, const SafeguardParams& params);

/// sign(z), or sat(z, eps) when the params ask for a smoothed z-sign.
double z_sign(double z, const SafeguardParams& params);

/// h2 h3 h(x) sign(z) / (c_z (1 + h3^2 z^2)).
double psi(const Vector& x, double z, const SafetySpec& safety, const SafeguardParams& params);

/// gamma1 = |dh/dx B|_inf rho1, gamma2 = |dh/dx B|_inf |E|_inf rho2, where B
/// selects the zeta block of the regular-form state.
Gammas gammas(const Vector& x, const RegularFormPlant& plant, const SafetySpec& safety);

SafeguardCoefficients coefficients(const Vector& x, double z, const Vector& s, const Vector& u_smc,
                                   const RegularFormPlant& plant, const SlidingSpec& sliding,
                                   const SafetySpec& safety, const SafeguardParams& params);

/// Picks the safeguard channel. ArgmaxAtActivation needs the coefficients at
/// the activation instant and throws ChannelDegenerate when every |a_i| is
/// below 1e-9.
std::size_t select_channel(const ChannelRule& rule, const Vector& x0, const SafeguardCoefficients* at_activation);

/// Closed-form solution of a_j u - b |u| = c on channel j.
///
/// Returns 0 outside ACTIVE, inside Omega, or when c <= 0. Otherwise returns
/// sign(a_j) c / (|a_j| - b), which is the smaller-magnitude root when both
/// branches apply (b < 0). Throws InfeasibleSafeguard when -b <= a_j <= b
/// (within the authority tolerance) or when the root exceeds max_abs_us, and
/// DegenerateDenominator when |a_j| - b < 1e-9.
double safeguard_control(const SafeguardCoefficients& coeffs, std::size_t j, const Vector& s, Mode mode,
                         const SafetySpec& safety, const SafeguardParams& params);

/// Augmented-state dynamics for the single-channel safeguard:
///   z' = -2 (lambda sqrt|z| + s_j Phat_jj u_s + |s_j| |E_j| rho2 |u_s|) / c_z * sign(z)
/// with Phat = M G_hat E and E_j the j-th column of E.
double z_derivative(const Vector& x, const Vector& s, double z, double u_s, std::size_t j,
                    const RegularFormPlant& plant, const SlidingSpec& sliding, const SafeguardParams& params);

/// PRE -> ACTIVE on first entry to the risky set (h <= h_bar), ACTIVE -> DONE
/// on entry to Omega. DONE is terminal.
ControllerState update_mode(ControllerState state, const Vector& x, const Vector& s, const SafetySpec& safety,
                            double t);

struct ResetOutcome {
    ControllerState state;
    bool reset = false;
};

/// Restores z to z0 when ACTIVE, |z| is below the reset threshold and x is in
/// the risky set of the original threshold h_bar.
ResetOutcome maybe_reset(ControllerState state, const Vector& x, const SafetySpec& safety,
                         const SafeguardParams& params);

}  // namespace safesmc
