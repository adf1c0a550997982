#pragma once

// Domain types for the two-loop safe sliding mode controller: the plant in
// regular form, the sliding manifold, the barrier, and the safeguard tuning.
// Nothing in this header integrates dynamics.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace safesmc {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

/// Matrices whose reciprocal condition number falls below this are singular.
inline constexpr double kSingularRcond = 1e-12;

/// sign(y) with the convention sign(0) = 1.
inline double sign(double y) { return y >= 0.0 ? 1.0 : -1.0; }

/// y/|y| outside the boundary layer |y| < eps, y/eps inside it.
inline double sat(double y, double eps) {
    if (std::abs(y) >= eps) return sign(y);
    return y / eps;
}

double reciprocal_condition(const Matrix& a);
/// Induced infinity norm (max absolute row sum).
double induced_inf_norm(const Matrix& a);

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
public:
    explicit SingularMatrix(std::string which)
        : Error("singular matrix: " + which), which_(std::move(which)) {}
    const std::string& which() const { return which_; }

private:
    std::string which_;
};

class InfeasibleSafeguard : public Error {
public:
    InfeasibleSafeguard(double a_j, double b, double c, std::string why)
        : Error(std::move(why)), a_j(a_j), b(b), c(c) {}
    double a_j, b, c;
};

class DegenerateDenominator : public Error {
public:
    explicit DegenerateDenominator(double denominator)
        : Error("safeguard denominator is degenerate: " + std::to_string(denominator)),
          denominator(denominator) {}
    double denominator;
};

class ChannelDegenerate : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    NonFiniteState(double t, std::string field)
        : Error("non-finite " + field + " at t=" + std::to_string(t)), t(t), field(std::move(field)) {}
    double t;
    std::string field;
};

class EmptyTrajectory : public Error {
public:
    EmptyTrajectory() : Error("trajectory is empty") {}
};

// ---------------------------------------------------------------------------
// Plant

/// Plant already transformed to regular coordinates x = [eta; zeta]:
///   eta'  = f_a(eta, zeta)
///   zeta' = f_b(eta, zeta) + G(t,x) E(x) u + delta(t,x)
/// G and delta are unknown to the controller; only G_true/delta_true (used by
/// the simulator) know them. The controller sees G_hat, g0 and the bounds.
struct RegularFormPlant {
    std::size_t n = 0;
    std::size_t p = 0;

    std::function<Vector(const Vector& eta, const Vector& zeta)> f_a;  // empty when m == 0
    std::function<Vector(const Vector& eta, const Vector& zeta)> f_b;
    std::function<Matrix(const Vector& x)> E;
    std::function<Matrix(const Vector& x)> G_hat;
    double g0 = 1.0;
    std::function<double(const Vector& x)> rho1;  // bound on |delta|_inf
    std::function<double(const Vector& x)> rho2;  // bound on |G - G_hat|_inf
    std::function<double(const Vector& x)> rho;   // per-channel bound on |Delta_i / g_i|

    // Simulation truth. G_true returns the diagonal of G.
    std::function<Vector(double t, const Vector& x)> G_true;
    std::function<Vector(double t, const Vector& x)> delta_true;

    std::size_t m() const { return n - p; }
    Vector eta(const Vector& x) const { return x.head(static_cast<Eigen::Index>(m())); }
    Vector zeta(const Vector& x) const { return x.tail(static_cast<Eigen::Index>(p)); }

    /// f_a(eta, zeta), or an empty vector when m == 0.
    Vector drift_a(const Vector& x) const;
    Vector drift_b(const Vector& x) const;
};

// ---------------------------------------------------------------------------
// Sliding manifold

enum class SwitchingKind { Sign, Sat };

struct Switching {
    SwitchingKind kind = SwitchingKind::Sign;
    double epsilon = 0.0;

    static Switching sign() { return {SwitchingKind::Sign, 0.0}; }
    static Switching sat(double eps) { return {SwitchingKind::Sat, eps}; }
};

/// s = M (zeta - phi(eta)). phi/jac_phi may be left empty, meaning phi == 0.
struct SlidingSpec {
    std::function<Vector(const Vector& eta)> phi;
    std::function<Matrix(const Vector& eta)> jac_phi;
    Matrix M;  // p x p; an empty matrix means identity
    double beta0 = 0.1;
    Switching switching;

    Matrix mixing(std::size_t p) const {
        return M.size() == 0 ? Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) : M;
    }
    bool mixing_is_identity(std::size_t p) const;
};

// ---------------------------------------------------------------------------
// Safety

struct SafetySpec {
    std::function<double(const Vector& x)> h;
    std::function<RowVector(const Vector& x)> grad_h;
    std::function<double(double r)> alpha;
    double h_bar = 1.0;         // risky set is 0 <= h <= h_bar
    double omega_radius = 1.0;  // Omega = { |s|_2 < omega_radius }

    static std::function<double(double)> linear_alpha(double gain) {
        return [gain](double r) { return gain * r; };
    }
};

// ---------------------------------------------------------------------------
// Safeguard tuning

enum class ChannelRuleKind { Fixed, InitialCondition, ArgmaxAtActivation };

/// Which input channel carries u_s. Channels are 0-based here; the CLI and
/// file formats use 1-based indices.
struct ChannelRule {
    ChannelRuleKind kind = ChannelRuleKind::Fixed;
    std::size_t fixed = 0;
    std::function<std::size_t(const Vector& x0)> predicate;

    static ChannelRule fixed_channel(std::size_t j) { return {ChannelRuleKind::Fixed, j, {}}; }
    static ChannelRule initial_condition(std::function<std::size_t(const Vector&)> pick) {
        return {ChannelRuleKind::InitialCondition, 0, std::move(pick)};
    }
    static ChannelRule argmax_at_activation() { return {ChannelRuleKind::ArgmaxAtActivation, 0, {}}; }
};

struct SafeguardParams {
    // Upsilon(z) = h1 + h2 atan(h3 z); requires h1 > (pi/2) h2.
    double h1 = 1.0;
    double h2 = 0.2;
    double h3 = 1.0;
    double c_z = 2.0;
    double lambda = 1.0;
    double z0 = -10.0;
    std::optional<double> z_reset_threshold;  // absent disables resets
    ChannelRule channel;

    /// Channel j is treated as having no authority when |a_j| - b falls to
    /// within this fraction of max_i |a_i|.
    double authority_tolerance = 1e-4;
    /// Optional bound on |u_s|; solutions beyond it count as infeasible.
    std::optional<double> max_abs_us;
    /// Replace sign(z) by sat(z, z_sign_epsilon) in psi and the z-dynamics.
    bool smooth_z_sign = false;
    double z_sign_epsilon = 0.5;

    /// Throws std::invalid_argument when a field is out of range.
    void check() const;
};

// ---------------------------------------------------------------------------
// Controller state

enum class Mode { Pre, Active, Done };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

struct ControllerState {
    double z = 0.0;
    Mode mode = Mode::Pre;
    std::optional<std::size_t> channel;
    std::size_t reset_count = 0;
    std::optional<double> t1;
    bool fallback = false;  // u_smc suppressed after an infeasible safeguard
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string field;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool valid() const;
    std::vector<ValidationIssue> errors() const;
    std::vector<ValidationIssue> warnings() const;
    std::string describe() const;

    bool operator==(const ValidationReport&) const = default;
};

struct Scenario {
    RegularFormPlant plant;
    SlidingSpec sliding;
    SafetySpec safety;
    SafeguardParams params;
};

/// Evaluates every constructor invariant at x0 and collects violations.
/// Map evaluation failures become report entries.
ValidationReport validate_scenario(const RegularFormPlant& plant, const SlidingSpec& sliding,
                                   const SafetySpec& safety, const SafeguardParams& params,
                                   const Vector& x0);

inline ValidationReport validate_scenario(const Scenario& s, const Vector& x0) {
    return validate_scenario(s.plant, s.sliding, s.safety, s.params, x0);
}

class InvalidScenario : public Error {
public:
    explicit InvalidScenario(ValidationReport report)
        : Error("invalid scenario:\n" + report.describe()), report(std::move(report)) {}
    ValidationReport report;
};

}  // namespace safesmc
