#include "safesmc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace safesmc {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

// Walks one mapping, rejecting keys outside `allowed`.
class Section {
public:
    Section(const YAML::Node& node, std::string path, std::set<std::string> allowed) : node_(node), path_(std::move(path)) {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) throw ConfigError(where() + ": expected a mapping");
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw ConfigError("unknown key '" + join(key) + "'");
        }
    }

    bool has(const std::string& key) const { return node_ && node_[key] && !node_[key].IsNull(); }
    bool present(const std::string& key) const { return node_ && node_[key]; }
    YAML::Node child(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    void read(const std::string& key, T& out) const {
        if (!has(key)) return;
        try {
            out = node_[key].as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(join(key) + ": cannot parse value");
        }
    }

    void read_positive_count(const std::string& key, std::size_t& out) const {
        if (!has(key)) return;
        long long v = 0;
        read(key, v);
        if (v < 1) throw ConfigError(join(key) + ": must be a positive integer");
        out = static_cast<std::size_t>(v);
    }

    // null (or absent after presence) clears the optional.
    void read_optional(const std::string& key, std::optional<double>& out) const {
        if (!present(key)) return;
        if (node_[key].IsNull()) {
            out.reset();
            return;
        }
        double v = 0.0;
        read(key, v);
        out = v;
    }

private:
    std::string where() const { return path_.empty() ? "document" : path_; }
    YAML::Node node_;
    std::string path_;
};

SwitchingKind parse_switching(const std::string& text) {
    if (text == "sign") return SwitchingKind::Sign;
    if (text == "sat") return SwitchingKind::Sat;
    throw ConfigError("sliding.switching.kind: expected sign or sat, got '" + text + "'");
}

Integrator parse_integrator(const std::string& text) {
    if (text == "rk4") return Integrator::Rk4;
    if (text == "euler") return Integrator::Euler;
    throw ConfigError("sim.integrator: expected rk4 or euler, got '" + text + "'");
}

ChannelRuleName parse_channel_rule(const std::string& text) {
    if (text == "fixed") return ChannelRuleName::Fixed;
    if (text == "initial-condition") return ChannelRuleName::InitialCondition;
    if (text == "argmax") return ChannelRuleName::Argmax;
    throw ConfigError("safeguard.channel.rule: expected fixed, initial-condition or argmax, got '" + text + "'");
}

const char* to_string(ChannelRuleName r) {
    switch (r) {
        case ChannelRuleName::Fixed: return "fixed";
        case ChannelRuleName::InitialCondition: return "initial-condition";
        case ChannelRuleName::Argmax: return "argmax";
    }
    return "?";
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("YAML syntax error: ") + e.what());
    }
    ScenarioConfig c;
    if (!root || root.IsNull()) return c;

    const Section top(root, "", {"name", "plant", "obstacle", "safety", "sliding", "safeguard", "sim", "output"});
    top.read("name", c.name);

    const Section plant(top.child("plant"), "plant", {"family", "uncertainty"});
    if (plant.has("family")) {
        std::string family;
        plant.read("family", family);
        if (family != "robot") throw ConfigError("plant.family: only the built-in 'robot' family is available");
    }
    if (plant.has("uncertainty")) {
        std::string u;
        plant.read("uncertainty", u);
        try {
            c.uncertainty = robot::parse_uncertainty(u);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("plant.uncertainty: ") + e.what());
        }
    }

    const Section obstacle(top.child("obstacle"), "obstacle", {"center", "radius"});
    if (obstacle.has("center")) {
        std::vector<double> center;
        obstacle.read("center", center);
        if (center.size() != 2) throw ConfigError("obstacle.center: expected two numbers");
        c.obstacle.x1c = center[0];
        c.obstacle.x2c = center[1];
    }
    obstacle.read("radius", c.obstacle.radius);

    const Section safety(top.child("safety"), "safety", {"alpha_gain", "h_bar", "omega_radius"});
    safety.read("alpha_gain", c.alpha_gain);
    safety.read("h_bar", c.h_bar);
    safety.read("omega_radius", c.omega_radius);

    const Section sliding(top.child("sliding"), "sliding", {"beta0", "switching", "M"});
    sliding.read("beta0", c.beta0);
    sliding.read("M", c.M);
    const Section switching(sliding.child("switching"), "sliding.switching", {"kind", "epsilon"});
    if (switching.has("kind")) {
        std::string kind;
        switching.read("kind", kind);
        c.switching = parse_switching(kind);
    }
    switching.read("epsilon", c.switching_epsilon);

    const Section sg(top.child("safeguard"), "safeguard",
                     {"enabled", "h1", "h2", "h3", "c_z", "lambda", "z0", "z_reset_threshold", "channel",
                      "authority_tolerance", "max_abs_us", "smooth_z_sign", "z_sign_epsilon", "remark3_fallback"});
    sg.read("enabled", c.safeguard_enabled);
    sg.read("h1", c.h1);
    sg.read("h2", c.h2);
    sg.read("h3", c.h3);
    sg.read("c_z", c.c_z);
    sg.read("lambda", c.lambda);
    sg.read("z0", c.z0);
    sg.read_optional("z_reset_threshold", c.z_reset_threshold);
    sg.read("authority_tolerance", c.authority_tolerance);
    sg.read_optional("max_abs_us", c.max_abs_us);
    sg.read("smooth_z_sign", c.smooth_z_sign);
    sg.read("z_sign_epsilon", c.z_sign_epsilon);
    sg.read("remark3_fallback", c.remark3_fallback);
    const Section channel(sg.child("channel"), "safeguard.channel", {"rule", "j", "offset"});
    if (channel.has("rule")) {
        std::string rule;
        channel.read("rule", rule);
        c.channel_rule = parse_channel_rule(rule);
    }
    channel.read_positive_count("j", c.channel_j);
    channel.read("offset", c.channel_offset);

    const Section sim(top.child("sim"), "sim", {"x0", "dt", "t_end", "integrator", "record_stride"});
    sim.read("x0", c.x0);
    sim.read("dt", c.dt);
    sim.read("t_end", c.t_end);
    if (sim.has("integrator")) {
        std::string integrator;
        sim.read("integrator", integrator);
        c.integrator = parse_integrator(integrator);
    }
    sim.read_positive_count("record_stride", c.record_stride);

    const Section output(top.child("output"), "output", {"trajectory", "summary", "plot_script"});
    output.read("trajectory", c.trajectory_path);
    output.read("summary", c.summary_path);
    output.read("plot_script", c.plot_script_path);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

// Doubles go out as plain scalars in shortest round-trip form.
YAML::Emitter& put(YAML::Emitter& out, double v) { return out << format_double(v); }

void put_list(YAML::Emitter& out, const std::vector<double>& values) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double v : values) put(out, v);
    out << YAML::EndSeq;
}

void put_optional(YAML::Emitter& out, const std::optional<double>& v) {
    if (v) put(out, *v);
    else out << YAML::Null;
}

}  // namespace

std::string emit_config(const ScenarioConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;

    out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "family" << YAML::Value << "robot";
    out << YAML::Key << "uncertainty" << YAML::Value << robot::to_string(c.uncertainty);
    out << YAML::EndMap;

    out << YAML::Key << "obstacle" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "center" << YAML::Value;
    put_list(out, {c.obstacle.x1c, c.obstacle.x2c});
    out << YAML::Key << "radius" << YAML::Value;
    put(out, c.obstacle.radius);
    out << YAML::EndMap;

    out << YAML::Key << "safety" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "alpha_gain" << YAML::Value;
    put(out, c.alpha_gain);
    out << YAML::Key << "h_bar" << YAML::Value;
    put(out, c.h_bar);
    out << YAML::Key << "omega_radius" << YAML::Value;
    put(out, c.omega_radius);
    out << YAML::EndMap;

    out << YAML::Key << "sliding" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "beta0" << YAML::Value;
    put(out, c.beta0);
    out << YAML::Key << "switching" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << (c.switching == SwitchingKind::Sign ? "sign" : "sat");
    out << YAML::Key << "epsilon" << YAML::Value;
    put(out, c.switching_epsilon);
    out << YAML::EndMap;
    if (!c.M.empty()) {
        out << YAML::Key << "M" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& row : c.M) put_list(out, row);
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;

    out << YAML::Key << "safeguard" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "enabled" << YAML::Value << c.safeguard_enabled;
    const std::pair<const char*, double> scalars[] = {{"h1", c.h1},   {"h2", c.h2},         {"h3", c.h3},
                                                      {"c_z", c.c_z}, {"lambda", c.lambda}, {"z0", c.z0}};
    for (const auto& [key, value] : scalars) {
        out << YAML::Key << key << YAML::Value;
        put(out, value);
    }
    out << YAML::Key << "z_reset_threshold" << YAML::Value;
    put_optional(out, c.z_reset_threshold);
    out << YAML::Key << "channel" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "rule" << YAML::Value << to_string(c.channel_rule);
    out << YAML::Key << "j" << YAML::Value << c.channel_j;
    out << YAML::Key << "offset" << YAML::Value;
    put(out, c.channel_offset);
    out << YAML::EndMap;
    out << YAML::Key << "authority_tolerance" << YAML::Value;
    put(out, c.authority_tolerance);
    out << YAML::Key << "max_abs_us" << YAML::Value;
    put_optional(out, c.max_abs_us);
    out << YAML::Key << "smooth_z_sign" << YAML::Value << c.smooth_z_sign;
    out << YAML::Key << "z_sign_epsilon" << YAML::Value;
    put(out, c.z_sign_epsilon);
    out << YAML::Key << "remark3_fallback" << YAML::Value << c.remark3_fallback;
    out << YAML::EndMap;

    out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "x0" << YAML::Value;
    put_list(out, c.x0);
    out << YAML::Key << "dt" << YAML::Value;
    put(out, c.dt);
    out << YAML::Key << "t_end" << YAML::Value;
    put(out, c.t_end);
    out << YAML::Key << "integrator" << YAML::Value << to_string(c.integrator);
    out << YAML::Key << "record_stride" << YAML::Value << c.record_stride;
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "trajectory" << YAML::Value << YAML::DoubleQuoted << c.trajectory_path;
    out << YAML::Key << "summary" << YAML::Value << YAML::DoubleQuoted << c.summary_path;
    out << YAML::Key << "plot_script" << YAML::Value << YAML::DoubleQuoted << c.plot_script_path;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

BuiltScenario build(const ScenarioConfig& c) {
    BuiltScenario out;
    auto& sc = out.scenario;

    sc.plant = robot::make_plant(c.uncertainty);
    sc.safety = robot::make_safety(c.obstacle, c.alpha_gain, c.h_bar, c.omega_radius);

    sc.sliding.beta0 = c.beta0;
    sc.sliding.switching = {c.switching, c.switching == SwitchingKind::Sat ? c.switching_epsilon : 0.0};
    if (!c.M.empty()) {
        if (c.M.size() != 2 || c.M[0].size() != 2 || c.M[1].size() != 2)
            throw ConfigError("sliding.M: expected a 2x2 matrix");
        sc.sliding.M.resize(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 2; ++k) sc.sliding.M(r, k) = c.M[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }

    auto& p = sc.params;
    p.h1 = c.h1;
    p.h2 = c.h2;
    p.h3 = c.h3;
    p.c_z = c.c_z;
    p.lambda = c.lambda;
    p.z0 = c.z0;
    p.z_reset_threshold = c.z_reset_threshold;
    p.authority_tolerance = c.authority_tolerance;
    p.max_abs_us = c.max_abs_us;
    p.smooth_z_sign = c.smooth_z_sign;
    p.z_sign_epsilon = c.z_sign_epsilon;
    switch (c.channel_rule) {
        case ChannelRuleName::Fixed:
            if (c.channel_j < 1 || c.channel_j > 2) throw ConfigError("safeguard.channel.j: must be 1 or 2");
            p.channel = ChannelRule::fixed_channel(c.channel_j - 1);
            break;
        case ChannelRuleName::InitialCondition:
            p.channel = robot::diagonal_channel_rule(c.channel_offset);
            break;
        case ChannelRuleName::Argmax:
            p.channel = ChannelRule::argmax_at_activation();
            break;
    }

    if (c.x0.size() != 2) throw ConfigError("sim.x0: expected two numbers");
    out.sim.x0 = Eigen::Map<const Vector>(c.x0.data(), 2);
    out.sim.dt = c.dt;
    out.sim.t_end = c.t_end;
    out.sim.integrator = c.integrator;
    out.sim.record_stride = c.record_stride;

    out.options.safeguard_enabled = c.safeguard_enabled;
    out.options.remark3_fallback = c.remark3_fallback;
    return out;
}

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = {"robot-s1a",         "robot-s1b",         "robot-sat",
                                                   "robot-z50",         "robot-incompatible", "robot-altmanifold"};
    return names;
}

ScenarioConfig demo_config(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    if (name == "robot-s1a") return c;
    if (name == "robot-s1b") {
        c.x0 = {7.0, 4.5};
        // The x2(0) >= x1(0) - 2 rule picks channel 1 here, which runs out of authority.
        c.channel_rule = ChannelRuleName::Fixed;
        c.channel_j = 2;
        return c;
    }
    if (name == "robot-sat") {
        c.switching = SwitchingKind::Sat;
        c.switching_epsilon = 0.5;
        return c;
    }
    if (name == "robot-z50") {
        c.switching = SwitchingKind::Sat;
        c.switching_epsilon = 0.5;
        c.z0 = -50.0;
        c.z_reset_threshold.reset();
        return c;
    }
    if (name == "robot-incompatible" || name == "robot-altmanifold") {
        c.uncertainty = robot::Uncertainty::None;
        c.obstacle = {0.0, 3.0, 1.5};
        c.omega_radius = 0.5;
        c.x0 = {0.0, 6.0};
        c.channel_rule = ChannelRuleName::Fixed;
        c.channel_j = 1;
        c.record_stride = 10;
        c.t_end = 20.0;
        if (name == "robot-altmanifold") {
            c.M = {{1.0, -1.0}, {1.0, 1.0}};
            c.t_end = 80.0;
        }
        return c;
    }
    throw ConfigError("unknown demo '" + name + "'");
}

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {"h1", "h2", "h3", "c_z", "lambda", "z0", "h_bar", "dt"};
    return names;
}

void set_parameter(ScenarioConfig& c, const std::string& name, double value) {
    if (name == "h1") c.h1 = value;
    else if (name == "h2") c.h2 = value;
    else if (name == "h3") c.h3 = value;
    else if (name == "c_z") c.c_z = value;
    else if (name == "lambda") c.lambda = value;
    else if (name == "z0") c.z0 = value;
    else if (name == "h_bar") c.h_bar = value;
    else if (name == "dt") c.dt = value;
    else throw ConfigError("unknown sweep parameter '" + name + "'");
}

}  // namespace safesmc
