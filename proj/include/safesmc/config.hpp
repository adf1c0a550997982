#pragma once

// Scenario files. A scenario is a YAML mapping with the sections below; every
// key is optional and falls back to the listed default, but keys that are not
// listed are rejected.
//
//   name: robot-s1a
//   plant:     { family: robot, uncertainty: paper }        # paper | none
//   obstacle:  { center: [5, 3], radius: 2 }
//   safety:    { alpha_gain: 10, h_bar: 1, omega_radius: 3.83 }
//   sliding:
//     beta0: 0.1
//     switching: { kind: sign, epsilon: 0.5 }               # sign | sat
//     M: [[1, 0], [0, 1]]                                   # omitted = identity
//   safeguard:
//     enabled: true
//     h1: 1
//     h2: 0.2
//     h3: 1
//     c_z: 2
//     lambda: 1
//     z0: -10
//     z_reset_threshold: 1                                  # null disables resets
//     channel: { rule: initial-condition, offset: 2 }       # fixed (with j, 1-based) | argmax
//     authority_tolerance: 1.0e-4
//     max_abs_us: null
//     smooth_z_sign: false
//     z_sign_epsilon: 0.5
//     remark3_fallback: false
//   sim:       { x0: [7, 7], dt: 1.0e-4, t_end: 5, integrator: rk4, record_stride: 1 }
//   output:    { trajectory: "", summary: "", plot_script: "" }  # empty = derived from name

#include "safesmc/model.hpp"
#include "safesmc/robot.hpp"
#include "safesmc/sim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace safesmc {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ChannelRuleName { Fixed, InitialCondition, Argmax };

struct ScenarioConfig {
    std::string name = "scenario";

    robot::Uncertainty uncertainty = robot::Uncertainty::Paper;
    robot::Obstacle obstacle;

    double alpha_gain = 10.0;
    double h_bar = 1.0;
    double omega_radius = 3.83;

    double beta0 = 0.1;
    SwitchingKind switching = SwitchingKind::Sign;
    double switching_epsilon = 0.5;
    std::vector<std::vector<double>> M;  // empty = identity

    bool safeguard_enabled = true;
    double h1 = 1.0;
    double h2 = 0.2;
    double h3 = 1.0;
    double c_z = 2.0;
    double lambda = 1.0;
    double z0 = -10.0;
    std::optional<double> z_reset_threshold = 1.0;
    ChannelRuleName channel_rule = ChannelRuleName::InitialCondition;
    std::size_t channel_j = 2;     // 1-based, used by the fixed rule
    double channel_offset = 2.0;   // used by the initial-condition rule
    double authority_tolerance = 1e-4;
    std::optional<double> max_abs_us;
    bool smooth_z_sign = false;
    double z_sign_epsilon = 0.5;
    bool remark3_fallback = false;

    std::vector<double> x0 = {7.0, 7.0};
    double dt = 1e-4;
    double t_end = 5.0;
    Integrator integrator = Integrator::Rk4;
    std::size_t record_stride = 1;

    std::string trajectory_path;
    std::string summary_path;
    std::string plot_script_path;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError naming the offending key.
ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);
std::string emit_config(const ScenarioConfig& config);

struct BuiltScenario {
    Scenario scenario;
    SimConfig sim;
    RunOptions options;
};

/// Turns the plain description into live maps. Throws ConfigError for values
/// that cannot be represented (wrong x0 or M size, bad channel index).
BuiltScenario build(const ScenarioConfig& config);

const std::vector<std::string>& demo_names();
/// Throws ConfigError for an unknown name.
ScenarioConfig demo_config(const std::string& name);

/// Names accepted by sweeps.
const std::vector<std::string>& sweep_parameters();
/// Sets one tuning parameter or dt; throws ConfigError for an unknown name.
void set_parameter(ScenarioConfig& config, const std::string& name, double value);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace safesmc
