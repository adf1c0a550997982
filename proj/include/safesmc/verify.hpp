#pragma once

// Post-hoc monitors over a recorded trajectory. Every monitor recomputes what
// it checks from the logged (t, x, z, u_smc, u) rather than trusting logged
// internals, and none of them modifies the log.

#include "safesmc/model.hpp"
#include "safesmc/safeguard.hpp"
#include "safesmc/sim.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace safesmc {

inline constexpr double kSafetyTolerance = 1e-3;
inline constexpr double kResidualTolerance = 1e-6;

struct SafetyReport {
    double min_h = 0.0;
    std::optional<double> first_violation;  // first t with h < -tol
    bool passed() const { return !first_violation; }
};

/// Throws EmptyTrajectory on an empty log.
SafetyReport safety_report(const std::vector<TrajectoryRecord>& records, const SafetySpec& safety,
                           double tol = kSafetyTolerance);

struct ResidualReport {
    double min_residual = 0.0;  // meaningless when samples == 0
    std::optional<double> worst_time;
    std::size_t samples = 0;
    bool vacuous() const { return samples == 0; }
    bool passed() const { return vacuous() || min_residual >= -kResidualTolerance; }
};

/// min over ACTIVE samples with nonzero u_s of a_j u_s - b |u_s| - c. The
/// channel j and u_s are read off the applied control as the entry where
/// u differs most from u_smc.
ResidualReport inequality_residuals(const std::vector<TrajectoryRecord>& records, const Scenario& scenario);

struct BarrierReport {
    double min_residual = 0.0;
    std::optional<double> worst_time;
    double tolerance = 0.0;
    std::size_t samples = 0;
    std::size_t excluded_resets = 0;
    bool passed() const { return samples == 0 || min_residual >= -tolerance; }
};

/// min over ACTIVE samples of dh_Y/dt + alpha(h_Y) with h_Y = Upsilon(z) h(x)
/// and a forward difference for the derivative. The tolerance is
/// C dt with C = 10 max |second difference of h_Y| / dt^2 over the same
/// samples. Samples adjacent to a reset are excluded.
BarrierReport barrier_certificate(const std::vector<TrajectoryRecord>& records, const SafetySpec& safety,
                                  const SafeguardParams& params);

struct LyapunovViolation {
    double t = 0.0;
    double rate = 0.0;   // forward-difference dV/dt
    double bound = 0.0;  // -g0 beta0 |s|_1 - lambda sqrt|z|
};

struct LyapunovReport {
    std::vector<LyapunovViolation> violations;
    std::size_t samples = 0;
    std::size_t excluded_band = 0;
    std::size_t excluded_resets = 0;
    double s_band = 0.0;
    double z_band = 0.0;
    double tolerance = 0.0;
    /// Saturated switching: the bound is not claimed, violations are listed
    /// for information only.
    bool exempt = false;
    bool passed() const { return exempt || violations.empty(); }
};

/// Checks dV/dt <= -g0 beta0 |s|_1 - lambda sqrt|z| with V = |s|^2/2 + (c_z/2)|z|.
/// Samples with any |s_i| or |z| inside the chattering band (3x the largest
/// per-step change) and samples adjacent to resets are excluded.
LyapunovReport lyapunov_report(const std::vector<TrajectoryRecord>& records, const RegularFormPlant& plant,
                               const SlidingSpec& sliding, const SafeguardParams& params);

struct Grid {
    double lo = -200.0;
    double hi = 200.0;
    double step = 1e-3;

    std::size_t size() const;
    double at(std::size_t i) const { return lo + static_cast<double>(i) * step; }
};

/// max over the grid of a_j u - b |u| - c.
double feasibility_margin(double a_j, double b, double c, const Grid& grid);
/// Single-threaded reference for feasibility_margin.
double feasibility_margin_serial(double a_j, double b, double c, const Grid& grid);

/// True iff some grid u satisfies a_j u - b |u| >= c - slack.
bool feasibility_oracle(double a_j, double b, double c, const Grid& grid = {}, double slack = 0.0);
bool feasibility_oracle(const SafeguardCoefficients& coeffs, std::size_t j, const Grid& grid = {},
                        double slack = 0.0);

/// Grid resolution slack 2 step (|a_j| + |b|).
inline double grid_slack(double a_j, double b, const Grid& grid) {
    return 2.0 * grid.step * (std::abs(a_j) + std::abs(b));
}

struct VerifySummary {
    SafetyReport safety;
    ResidualReport inequality;
    BarrierReport barrier;
    LyapunovReport lyapunov;
    bool reached = false;               // reach_time present
    std::optional<double> reach_time;
    double reach_bound = 0.0;
    bool upsilon_in_range = true;

    bool monitors_passed() const {
        return inequality.passed() && barrier.passed() && lyapunov.passed() && upsilon_in_range;
    }
};

VerifySummary verify_all(const std::vector<TrajectoryRecord>& records, const Scenario& scenario);

/// Exit status contract: 0 pass, 2 safety violation, 3 infeasible or
/// degenerate safeguard, 4 other monitor failure or non-finite state.
int exit_status(RunStatus status, const VerifySummary& summary);

/// Plain-text report.
std::string describe(const VerifySummary& summary);

}  // namespace safesmc
