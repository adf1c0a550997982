#include "safesmc/smc.hpp"

#include <algorithm>
#include <cmath>

namespace safesmc {

namespace {

Matrix checked_inverse(const Matrix& a, const char* which) {
    if (reciprocal_condition(a) < kSingularRcond) throw SingularMatrix(which);
    return a.inverse();
}

}  // namespace

Vector sliding_variable(const SlidingSpec& sliding, const Vector& eta, const Vector& zeta) {
    Vector offset = zeta;
    if (eta.size() > 0 && sliding.phi) offset -= sliding.phi(eta);
    if (sliding.M.size() == 0) return offset;
    return sliding.M * offset;
}

Vector switching_term(const Vector& s, const Switching& switching) {
    Vector out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out(i) = switching.kind == SwitchingKind::Sign ? sign(s(i)) : sat(s(i), switching.epsilon);
    }
    return out;
}

Matrix input_to_sliding_gain(const RegularFormPlant& plant, const SlidingSpec& sliding, const Vector& x) {
    const Matrix ghat_e = plant.G_hat(x) * plant.E(x);
    if (sliding.M.size() == 0) return ghat_e;
    return sliding.M * ghat_e;
}

UnsafeControlOutput unsafe_control(const RegularFormPlant& plant, const SlidingSpec& sliding, const Vector& x) {
    const Vector eta = plant.eta(x);
    const Vector zeta = plant.zeta(x);

    UnsafeControlOutput out;
    out.s = sliding_variable(sliding, eta, zeta);
    out.beta = plant.rho(x) + sliding.beta0;
    out.v = -out.beta * switching_term(out.s, sliding.switching);

    // Equivalent-control part: f_b - (dphi/deta) f_a.
    Vector drift = plant.drift_b(x);
    if (plant.m() > 0 && sliding.jac_phi) drift -= sliding.jac_phi(eta) * plant.drift_a(x);

    const Matrix e_inv = checked_inverse(plant.E(x), "E");
    const Matrix ghat_inv = checked_inverse(plant.G_hat(x), "G_hat");
    Vector reaching = out.v;
    if (sliding.M.size() != 0) reaching = checked_inverse(sliding.M, "M") * out.v;

    out.u_smc = e_inv * (-(ghat_inv * drift) + reaching);
    return out;
}

double reaching_time_bound(const Vector& s0, double z0, double g0, double beta0, double lambda, double c_z) {
    const double v0 = 0.5 * s0.squaredNorm() + 0.5 * c_z * std::abs(z0);
    const double mu = std::min(g0 * beta0, lambda / std::sqrt(c_z));
    return std::sqrt(2.0 * v0) / mu;
}

}  // namespace safesmc
