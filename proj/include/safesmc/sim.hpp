#pragma once

// Fixed-step simulation of the coupled (x, z) system under
// u = u_smc + u_s e_j, driven by the plant's truth maps.

#include "safesmc/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace safesmc {

enum class Integrator { Euler, Rk4 };

const char* to_string(Integrator integrator);

struct SimConfig {
    double dt = 1e-4;
    double t_end = 5.0;
    Integrator integrator = Integrator::Rk4;
    Vector x0;
    std::size_t record_stride = 1;  // keep every k-th step (and the last)

    /// Throws std::invalid_argument on dt <= 0, t_end < 0 or stride 0.
    void check() const;
    /// Number of integration steps; the run logs steps() + 1 instants.
    std::size_t steps() const;
};

/// Start-of-step snapshot; one CSV row.
struct TrajectoryRecord {
    double t = 0.0;
    Vector x;
    double z = 0.0;
    Vector s;
    Vector u_smc;
    double u_s = 0.0;
    Vector u;
    double h = 0.0;
    double h_upsilon = 0.0;
    double V_smc = 0.0;
    double V_z = 0.0;
    double V_total = 0.0;
    Mode mode = Mode::Pre;
    bool reset_flag = false;
};

/// Bitwise equality of every field.
bool identical(const TrajectoryRecord& lhs, const TrajectoryRecord& rhs);
bool identical(const std::vector<TrajectoryRecord>& lhs, const std::vector<TrajectoryRecord>& rhs);

struct EventLog {
    std::optional<double> t1;           // first entry to the risky set
    std::vector<double> reset_times;
    std::optional<double> t_omega;      // entry to Omega
    std::optional<double> infeasible_at;
    double min_h = 0.0;
    std::optional<double> reach_time;   // first |s|_inf < 0.05
    std::vector<double> fallback_times; // starts of u_smc suppression
};

struct RunMetrics {
    double us_l1 = 0.0;       // integral of |u_s| dt
    double control_tv = 0.0;  // sum of |u(k+1) - u(k)|_1 over steps
    std::size_t steps = 0;
};

struct RunOptions {
    bool safeguard_enabled = true;
    /// On infeasibility, zero the control until the state leaves the risky
    /// set instead of aborting.
    bool remark3_fallback = false;
};

enum class RunStatus { Completed, InfeasibleSafeguard, DegenerateDenominator, ChannelDegenerate, NonFiniteState };

const char* to_string(RunStatus status);

struct RunResult {
    std::vector<TrajectoryRecord> records;
    EventLog events;
    RunMetrics metrics;
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::optional<std::size_t> channel;
    Vector final_x;
    double final_z = 0.0;
};

struct StepResult {
    Vector x;
    double z = 0.0;
    TrajectoryRecord record;
};

/// Threshold on |s|_inf that defines the reaching instant.
inline constexpr double kReachThreshold = 0.05;

/// One zero-order-hold step from (x, state.z) at time t. The mode in `state`
/// must already be updated for time t. Throws InfeasibleSafeguard /
/// DegenerateDenominator from the safeguard and NonFiniteState when the new
/// state is not finite.
StepResult step(const Scenario& scenario, const ControllerState& state, const Vector& x, double t, double dt,
                Integrator integrator, bool safeguard_enabled = true);

/// Simulates [0, t_end]. Throws InvalidScenario when validation fails;
/// safeguard failures end the run early with a partial log and a status.
RunResult run(const Scenario& scenario, const SimConfig& config, const RunOptions& options = {});

struct EnergySeries {
    std::vector<double> V_smc;
    std::vector<double> V_z;
    std::vector<double> V_total;
};

/// Throws EmptyTrajectory on an empty log.
EnergySeries energy_series(const std::vector<TrajectoryRecord>& records);

}  // namespace safesmc
