#include "safesmc/verify.hpp"

#include "safesmc/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace safesmc {

namespace {

Vector recompute_s(const TrajectoryRecord& r, const RegularFormPlant& plant, const SlidingSpec& sliding) {
    return sliding_variable(sliding, plant.eta(r.x), plant.zeta(r.x));
}

// True when record k or k+1 carries a reset, i.e. z jumps inside [t_k, t_k+1].
bool reset_adjacent(const std::vector<TrajectoryRecord>& records, std::size_t k) {
    return records[k].reset_flag || (k + 1 < records.size() && records[k + 1].reset_flag);
}

}  // namespace

SafetyReport safety_report(const std::vector<TrajectoryRecord>& records, const SafetySpec& safety, double tol) {
    if (records.empty()) throw EmptyTrajectory();
    SafetyReport out;
    out.min_h = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        const double h = safety.h(r.x);
        out.min_h = std::min(out.min_h, h);
        if (!out.first_violation && h < -tol) out.first_violation = r.t;
    }
    return out;
}

ResidualReport inequality_residuals(const std::vector<TrajectoryRecord>& records, const Scenario& sc) {
    ResidualReport out;
    out.min_residual = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (r.mode != Mode::Active) continue;
        Eigen::Index j = 0;
        const Vector applied = r.u - r.u_smc;
        if (applied.size() == 0 || applied.cwiseAbs().maxCoeff(&j) == 0.0) continue;

        const double u_s = applied(j);
        const Vector s = recompute_s(r, sc.plant, sc.sliding);
        const auto coeffs = coefficients(r.x, r.z, s, r.u_smc, sc.plant, sc.sliding, sc.safety, sc.params);
        const double residual = coeffs.a(j) * u_s - coeffs.b * std::abs(u_s) - coeffs.c;
        ++out.samples;
        if (residual < out.min_residual) {
            out.min_residual = residual;
            out.worst_time = r.t;
        }
    }
    if (out.samples == 0) out.min_residual = 0.0;
    return out;
}

BarrierReport barrier_certificate(const std::vector<TrajectoryRecord>& records, const SafetySpec& safety,
                                  const SafeguardParams& params) {
    BarrierReport out;
    const std::size_t n = records.size();
    if (n < 2) return out;

    std::vector<double> hy(n);
    for (std::size_t k = 0; k < n; ++k) hy[k] = upsilon(records[k].z, params) * safety.h(records[k].x);

    // Curvature over the samples the check will use.
    double curvature = 0.0;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        if (records[k].mode != Mode::Active || reset_adjacent(records, k) || reset_adjacent(records, k + 1)) continue;
        const double dt0 = records[k + 1].t - records[k].t;
        const double dt1 = records[k + 2].t - records[k + 1].t;
        if (!(dt0 > 0.0) || !(dt1 > 0.0)) continue;
        const double second = ((hy[k + 2] - hy[k + 1]) / dt1 - (hy[k + 1] - hy[k]) / dt0) / (0.5 * (dt0 + dt1));
        curvature = std::max(curvature, std::abs(second));
    }

    double max_dt = 0.0;
    out.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (records[k].mode != Mode::Active) continue;
        if (reset_adjacent(records, k)) {
            ++out.excluded_resets;
            continue;
        }
        const double dt = records[k + 1].t - records[k].t;
        if (!(dt > 0.0)) continue;
        max_dt = std::max(max_dt, dt);
        const double residual = (hy[k + 1] - hy[k]) / dt + safety.alpha(hy[k]);
        ++out.samples;
        if (residual < out.min_residual) {
            out.min_residual = residual;
            out.worst_time = records[k].t;
        }
    }
    if (out.samples == 0) out.min_residual = 0.0;
    out.tolerance = 10.0 * curvature * max_dt;
    return out;
}

LyapunovReport lyapunov_report(const std::vector<TrajectoryRecord>& records, const RegularFormPlant& plant,
                               const SlidingSpec& sliding, const SafeguardParams& params) {
    LyapunovReport out;
    out.exempt = sliding.switching.kind == SwitchingKind::Sat;
    const std::size_t n = records.size();
    if (n < 2) return out;

    std::vector<Vector> s(n);
    std::vector<double> v(n), bound(n);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = recompute_s(records[k], plant, sliding);
        const double z = records[k].z;
        v[k] = 0.5 * s[k].squaredNorm() + 0.5 * params.c_z * std::abs(z);
        bound[k] = -plant.g0 * sliding.beta0 * s[k].lpNorm<1>() - params.lambda * std::sqrt(std::abs(z));
    }

    double max_ds = 0.0, max_dz = 0.0, max_dbound = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (reset_adjacent(records, k)) continue;
        max_ds = std::max(max_ds, (s[k + 1] - s[k]).cwiseAbs().maxCoeff());
        max_dz = std::max(max_dz, std::abs(records[k + 1].z - records[k].z));
        max_dbound = std::max(max_dbound, std::abs(bound[k + 1] - bound[k]));
    }
    out.s_band = 3.0 * max_ds;
    out.z_band = 3.0 * max_dz;
    out.tolerance = 10.0 * max_dbound;

    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (reset_adjacent(records, k)) {
            ++out.excluded_resets;
            continue;
        }
        const bool in_band = s[k].cwiseAbs().minCoeff() <= out.s_band || std::abs(records[k].z) <= out.z_band ||
                             s[k + 1].cwiseAbs().minCoeff() <= out.s_band;
        if (in_band) {
            ++out.excluded_band;
            continue;
        }
        const double dt = records[k + 1].t - records[k].t;
        if (!(dt > 0.0)) continue;
        ++out.samples;
        const double rate = (v[k + 1] - v[k]) / dt;
        if (rate > bound[k] + out.tolerance) out.violations.push_back({records[k].t, rate, bound[k]});
    }
    return out;
}

std::size_t Grid::size() const {
    if (!(step > 0.0) || hi < lo) return 0;
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double feasibility_margin_serial(double a_j, double b, double c, const Grid& grid) {
    const std::size_t n = grid.size();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = grid.at(i);
        best = std::max(best, a_j * u - b * std::abs(u));
    }
    return best - c;
}

double feasibility_margin(double a_j, double b, double c, const Grid& grid) {
    const auto n = static_cast<long long>(grid.size());
    double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(max : best) schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double u = grid.at(static_cast<std::size_t>(i));
        best = std::max(best, a_j * u - b * std::abs(u));
    }
    return best - c;
}

bool feasibility_oracle(double a_j, double b, double c, const Grid& grid, double slack) {
    return feasibility_margin(a_j, b, c, grid) >= -slack;
}

bool feasibility_oracle(const SafeguardCoefficients& coeffs, std::size_t j, const Grid& grid, double slack) {
    return feasibility_oracle(coeffs.a(static_cast<Eigen::Index>(j)), coeffs.b, coeffs.c, grid, slack);
}

VerifySummary verify_all(const std::vector<TrajectoryRecord>& records, const Scenario& sc) {
    VerifySummary out;
    out.safety = safety_report(records, sc.safety);
    out.inequality = inequality_residuals(records, sc);
    out.barrier = barrier_certificate(records, sc.safety, sc.params);
    out.lyapunov = lyapunov_report(records, sc.plant, sc.sliding, sc.params);

    const double lo = sc.params.h1 - std::numbers::pi / 2.0 * sc.params.h2;
    const double hi = sc.params.h1 + std::numbers::pi / 2.0 * sc.params.h2;
    double prev_sinf = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        const double y = upsilon(r.z, sc.params);
        if (!(y > lo && y < hi)) out.upsilon_in_range = false;

        const double sinf = recompute_s(r, sc.plant, sc.sliding).cwiseAbs().maxCoeff();
        if (!out.reach_time && sinf < kReachThreshold) {
            if (k == 0) {
                out.reach_time = r.t;
            } else {
                const double t0 = records[k - 1].t;
                const double f0 = prev_sinf - kReachThreshold, f1 = sinf - kReachThreshold;
                out.reach_time = f0 - f1 > 0.0 ? t0 + f0 / (f0 - f1) * (r.t - t0) : r.t;
            }
        }
        prev_sinf = sinf;
    }
    out.reached = out.reach_time.has_value();
    const auto& first = records.front();
    out.reach_bound = reaching_time_bound(recompute_s(first, sc.plant, sc.sliding), first.z, sc.plant.g0,
                                          sc.sliding.beta0, sc.params.lambda, sc.params.c_z);
    return out;
}

int exit_status(RunStatus status, const VerifySummary& summary) {
    if (status == RunStatus::InfeasibleSafeguard || status == RunStatus::DegenerateDenominator ||
        status == RunStatus::ChannelDegenerate)
        return 3;
    if (!summary.safety.passed()) return 2;
    if (status == RunStatus::NonFiniteState) return 4;
    return summary.monitors_passed() ? 0 : 4;
}

std::string describe(const VerifySummary& s) {
    std::ostringstream out;
    out.precision(6);
    auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

    out << "safety            " << verdict(s.safety.passed()) << "  min_h=" << s.safety.min_h;
    if (s.safety.first_violation) out << "  first violation t=" << *s.safety.first_violation;
    out << '\n';

    out << "inequality        " << verdict(s.inequality.passed());
    if (s.inequality.vacuous()) out << "  vacuous (no active u_s samples)";
    else out << "  min residual=" << s.inequality.min_residual << " over " << s.inequality.samples << " samples";
    out << '\n';

    out << "barrier           " << verdict(s.barrier.passed()) << "  min residual=" << s.barrier.min_residual
        << "  tol=" << s.barrier.tolerance << "  samples=" << s.barrier.samples
        << "  reset-excluded=" << s.barrier.excluded_resets << '\n';

    out << "lyapunov          ";
    if (s.lyapunov.exempt) out << "EXEMPT (saturated switching)";
    else out << verdict(s.lyapunov.passed());
    out << "  violations=" << s.lyapunov.violations.size() << "  samples=" << s.lyapunov.samples
        << "  band-excluded=" << s.lyapunov.excluded_band << "  reset-excluded=" << s.lyapunov.excluded_resets
        << '\n';

    out << "upsilon range     " << verdict(s.upsilon_in_range) << '\n';
    out << "reaching          ";
    if (s.reach_time) out << "t=" << *s.reach_time;
    else out << "not reached";
    out << "  bound=" << s.reach_bound << '\n';
    return out.str();
}

}  // namespace safesmc
