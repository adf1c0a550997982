#include "safesmc/model.hpp"

#include <numbers>
#include <sstream>

namespace safesmc {

double reciprocal_condition(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    if (!(largest > 0.0)) return 0.0;
    return sv(sv.size() - 1) / largest;
}

double induced_inf_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

Vector RegularFormPlant::drift_a(const Vector& x) const {
    if (m() == 0 || !f_a) return Vector::Zero(static_cast<Eigen::Index>(m()));
    return f_a(eta(x), zeta(x));
}

Vector RegularFormPlant::drift_b(const Vector& x) const {
    if (!f_b) return Vector::Zero(static_cast<Eigen::Index>(p));
    return f_b(eta(x), zeta(x));
}

bool SlidingSpec::mixing_is_identity(std::size_t p) const {
    if (M.size() == 0) return true;
    const auto dim = static_cast<Eigen::Index>(p);
    return M.rows() == dim && M.cols() == dim && M == Matrix::Identity(dim, dim);
}

void SafeguardParams::check() const {
    std::ostringstream out;
    if (!(h1 > 0.0)) out << "h1 must be > 0; ";
    if (!(h2 > 0.0)) out << "h2 must be > 0; ";
    if (!(h3 > 0.0)) out << "h3 must be > 0; ";
    if (!(h1 > std::numbers::pi / 2.0 * h2)) out << "h1 must exceed (pi/2) h2; ";
    if (!(c_z > 0.0)) out << "c_z must be > 0; ";
    if (!(lambda > 0.0)) out << "lambda must be > 0; ";
    if (!std::isfinite(z0)) out << "z0 must be finite; ";
    if (z_reset_threshold && !(*z_reset_threshold > 0.0)) out << "z_reset_threshold must be > 0; ";
    if (!(authority_tolerance >= 0.0 && authority_tolerance < 1.0)) out << "authority_tolerance must be in [0, 1); ";
    if (max_abs_us && !(*max_abs_us > 0.0)) out << "max_abs_us must be > 0; ";
    if (smooth_z_sign && !(z_sign_epsilon > 0.0)) out << "z_sign_epsilon must be > 0; ";
    if (channel.kind == ChannelRuleKind::InitialCondition && !channel.predicate)
        out << "initial-condition channel rule needs a predicate; ";
    const auto text = out.str();
    if (!text.empty()) throw std::invalid_argument("SafeguardParams: " + text);
}

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Pre: return "PRE";
        case Mode::Active: return "ACTIVE";
        case Mode::Done: return "DONE";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& text) {
    if (text == "PRE") return Mode::Pre;
    if (text == "ACTIVE") return Mode::Active;
    if (text == "DONE") return Mode::Done;
    return std::nullopt;
}

bool ValidationReport::valid() const { return errors().empty(); }

std::vector<ValidationIssue> ValidationReport::errors() const {
    std::vector<ValidationIssue> out;
    for (const auto& issue : issues)
        if (issue.severity == ValidationIssue::Severity::Error) out.push_back(issue);
    return out;
}

std::vector<ValidationIssue> ValidationReport::warnings() const {
    std::vector<ValidationIssue> out;
    for (const auto& issue : issues)
        if (issue.severity == ValidationIssue::Severity::Warning) out.push_back(issue);
    return out;
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    for (const auto& issue : issues) {
        out << (issue.severity == ValidationIssue::Severity::Error ? "error" : "warning") << ": "
            << issue.field << ": " << issue.message << '\n';
    }
    return out.str();
}

namespace {

class Collector {
public:
    void error(std::string field, std::string message) {
        report_.issues.push_back({ValidationIssue::Severity::Error, std::move(field), std::move(message)});
    }
    void warning(std::string field, std::string message) {
        report_.issues.push_back({ValidationIssue::Severity::Warning, std::move(field), std::move(message)});
    }

    // Runs fn, turning any exception into an error entry for `field`.
    template <typename Fn>
    bool guarded(const std::string& field, Fn&& fn) {
        try {
            fn();
            return true;
        } catch (const std::exception& e) {
            error(field, std::string("evaluation failed: ") + e.what());
        } catch (...) {
            error(field, "evaluation failed");
        }
        return false;
    }

    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
};

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

ValidationReport validate_scenario(const RegularFormPlant& plant, const SlidingSpec& sliding,
                                   const SafetySpec& safety, const SafeguardParams& params,
                                   const Vector& x0) {
    Collector out;
    const auto n = static_cast<Eigen::Index>(plant.n);
    const auto p = static_cast<Eigen::Index>(plant.p);

    if (plant.n == 0) out.error("plant.n", "state dimension must be positive");
    if (plant.p == 0 || plant.p > plant.n) out.error("plant.p", "input dimension must satisfy 1 <= p <= n");
    if (x0.size() != n) {
        out.error("x0", "expected " + std::to_string(plant.n) + " components, got " + std::to_string(x0.size()));
        return out.take();
    }
    if (!all_finite(x0)) out.error("x0", "non-finite component");
    if (!(plant.g0 > 0.0)) out.error("plant.g0", "must be > 0");
    if (!plant.f_b || !plant.E || !plant.G_hat || !plant.rho1 || !plant.rho2 || !plant.rho ||
        !plant.G_true || !plant.delta_true) {
        out.error("plant", "a required map is missing");
        return out.take();
    }
    if (plant.m() > 0 && !plant.f_a) out.error("plant.f_a", "required when m > 0");

    // Plant maps at x0.
    out.guarded("plant.f_b", [&] {
        if (plant.drift_b(x0).size() != p) out.error("plant.f_b", "wrong output dimension");
    });
    if (plant.m() > 0 && plant.f_a) {
        out.guarded("plant.f_a", [&] {
            if (plant.drift_a(x0).size() != n - p) out.error("plant.f_a", "wrong output dimension");
        });
    }
    out.guarded("plant.E", [&] {
        const Matrix e = plant.E(x0);
        if (e.rows() != p || e.cols() != p) out.error("plant.E", "must be p x p");
        else if (reciprocal_condition(e) < kSingularRcond) out.error("plant.E", "singular at x0");
    });
    out.guarded("plant.G_hat", [&] {
        const Matrix g = plant.G_hat(x0);
        if (g.rows() != p || g.cols() != p) out.error("plant.G_hat", "must be p x p");
        else if (reciprocal_condition(g) < kSingularRcond) out.error("plant.G_hat", "singular at x0");
    });
    double rho2_at_x0 = 0.0;
    out.guarded("plant.rho", [&] {
        const double r1 = plant.rho1(x0);
        rho2_at_x0 = plant.rho2(x0);
        const double r = plant.rho(x0);
        if (!(r1 >= 0.0)) out.error("plant.rho1", "must be >= 0");
        if (!(rho2_at_x0 >= 0.0)) out.error("plant.rho2", "must be >= 0");
        if (!(r >= 0.0)) out.error("plant.rho", "must be >= 0");
    });
    out.guarded("plant.G_true", [&] {
        const Vector g = plant.G_true(0.0, x0);
        if (g.size() != p) {
            out.error("plant.G_true", "must return p diagonal entries");
            return;
        }
        if ((g.array() < plant.g0).any()) out.error("plant.G_true", "diagonal entry below g0 at (0, x0)");
        const Matrix ghat = plant.G_hat(x0);
        const Matrix diff = Matrix(g.asDiagonal()) - ghat;
        if (induced_inf_norm(diff) > plant.rho2(x0) + 1e-12)
            out.error("plant.G_true", "|G_true - G_hat|_inf exceeds rho2 at (0, x0)");
    });
    out.guarded("plant.delta_true", [&] {
        const Vector d = plant.delta_true(0.0, x0);
        if (d.size() != p) {
            out.error("plant.delta_true", "must return p entries");
            return;
        }
        if (d.cwiseAbs().maxCoeff() > plant.rho1(x0) + 1e-12)
            out.error("plant.delta_true", "|delta_true|_inf exceeds rho1 at (0, x0)");
    });

    // Sliding manifold.
    if (!(sliding.beta0 > 0.0)) out.error("sliding.beta0", "must be > 0");
    if (sliding.switching.kind == SwitchingKind::Sat && !(sliding.switching.epsilon > 0.0))
        out.error("sliding.switching", "saturation width must be > 0");
    const Matrix mix = sliding.mixing(plant.p);
    if (mix.rows() != p || mix.cols() != p) {
        out.error("sliding.M", "must be p x p");
    } else if (reciprocal_condition(mix) < kSingularRcond) {
        out.error("sliding.M", "must be nonsingular");
    } else if (!sliding.mixing_is_identity(plant.p) && rho2_at_x0 > 0.0) {
        out.warning("sliding.M", "M != I with rho2 > 0: diagonal-gain robustness argument does not carry over");
    }
    if (plant.m() > 0 && sliding.phi) {
        out.guarded("sliding.phi", [&] {
            const Vector at_zero = sliding.phi(Vector::Zero(n - p));
            if (at_zero.size() != p) out.error("sliding.phi", "wrong output dimension");
            else if (at_zero.cwiseAbs().maxCoeff() > 1e-12) out.error("sliding.phi", "phi(0) must be 0");
            if (!sliding.jac_phi) out.error("sliding.jac_phi", "required when phi is given");
            else if (const Matrix j = sliding.jac_phi(plant.eta(x0)); j.rows() != p || j.cols() != n - p)
                out.error("sliding.jac_phi", "must be p x m");
        });
    }

    // Safety.
    if (!safety.h || !safety.grad_h || !safety.alpha) {
        out.error("safety", "a required map is missing");
    } else {
        out.guarded("safety.h", [&] {
            if (!(safety.h(Vector::Zero(n)) > 0.0)) out.error("safety.h", "origin must lie strictly inside the safe set");
            if (!std::isfinite(safety.h(x0))) out.error("safety.h", "non-finite at x0");
        });
        out.guarded("safety.grad_h", [&] {
            if (safety.grad_h(x0).size() != n) out.error("safety.grad_h", "must have n entries");
        });
        out.guarded("safety.alpha", [&] {
            if (std::abs(safety.alpha(0.0)) > 1e-12) out.error("safety.alpha", "alpha(0) must be 0");
            double previous = safety.alpha(-100.0);
            for (int i = -999; i <= 1000; ++i) {
                const double value = safety.alpha(0.1 * i);
                if (!(value > previous)) {
                    out.error("safety.alpha", "not strictly increasing on the sample grid");
                    break;
                }
                previous = value;
            }
        });
    }
    if (!(safety.h_bar > 0.0)) out.error("safety.h_bar", "must be > 0");
    if (!(safety.omega_radius > 0.0)) out.error("safety.omega_radius", "must be > 0");

    // Safeguard.
    try {
        params.check();
    } catch (const std::invalid_argument& e) {
        out.error("safeguard", e.what());
    }
    if (params.channel.kind == ChannelRuleKind::Fixed && params.channel.fixed >= plant.p)
        out.error("safeguard.channel", "fixed channel out of range");
    if (params.channel.kind == ChannelRuleKind::InitialCondition && params.channel.predicate) {
        out.guarded("safeguard.channel", [&] {
            if (params.channel.predicate(x0) >= plant.p) out.error("safeguard.channel", "predicate picks channel out of range");
        });
    }

    return out.take();
}

}  // namespace safesmc
