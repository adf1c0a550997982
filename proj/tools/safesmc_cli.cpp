// safesmc: run, demo, sweep and verify safe sliding mode scenarios.
//
// Exit status: 0 pass, 1 usage or parse error, 2 safety violation,
// 3 infeasible safeguard, 4 other monitor failure or non-finite state.

#include "safesmc/config.hpp"
#include "safesmc/sim.hpp"
#include "safesmc/sweep.hpp"
#include "safesmc/trajectory_io.hpp"
#include "safesmc/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace safesmc;

struct OutputFlags {
    std::string out_dir = ".";
    std::string csv;
    std::string summary;
    std::string plot_script;
    bool no_safeguard = false;
    bool remark3_fallback = false;
    bool quiet = false;
};

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
    cmd->add_option("--out-dir", f.out_dir, "Directory for output files")->capture_default_str();
    cmd->add_option("--csv", f.csv, "Trajectory CSV path (default <out-dir>/<name>.csv)");
    cmd->add_option("--summary", f.summary, "JSON summary path (default <out-dir>/<name>.summary.json)");
    cmd->add_option("--plot-script", f.plot_script, "Also write a gnuplot script to this path");
    cmd->add_flag("--no-safeguard", f.no_safeguard, "Force u_s = 0 (plain sliding mode baseline)");
    cmd->add_flag("--remark3-fallback", f.remark3_fallback,
                  "On infeasibility set u_smc to zero until the trajectory exits the risky set");
    cmd->add_flag("-q,--quiet", f.quiet, "Only print the verdict line");
}

std::string pick(const std::string& flag, const std::string& from_config, const std::string& dir,
                 const std::string& fallback) {
    if (!flag.empty()) return flag;
    if (!from_config.empty()) return from_config;
    return (std::filesystem::path(dir) / fallback).string();
}

void print_events(const RunResult& r) {
    auto opt = [](const std::optional<double>& v) {
        std::ostringstream s;
        s << std::setprecision(6);
        if (v) s << *v;
        else s << "-";
        return s.str();
    };
    std::cout << std::setprecision(6);
    std::cout << "status            " << to_string(r.status);
    if (!r.message.empty()) std::cout << "  (" << r.message << ")";
    std::cout << '\n';
    std::cout << "channel           " << (r.channel ? std::to_string(*r.channel + 1) : "-") << '\n';
    std::cout << "t1                " << opt(r.events.t1) << '\n';
    std::cout << "resets            " << r.events.reset_times.size();
    for (double t : r.events.reset_times) std::cout << ' ' << t;
    std::cout << '\n';
    std::cout << "t_omega           " << opt(r.events.t_omega) << '\n';
    std::cout << "infeasible_at     " << opt(r.events.infeasible_at) << '\n';
    std::cout << "min_h             " << r.events.min_h << '\n';
    std::cout << "int |u_s| dt      " << r.metrics.us_l1 << '\n';
    std::cout << "final x           " << r.final_x.transpose() << '\n';
}

int execute(ScenarioConfig config, const OutputFlags& f) {
    if (f.no_safeguard) config.safeguard_enabled = false;
    if (f.remark3_fallback) config.remark3_fallback = true;
    const auto built = build(config);
    const auto result = run(built.scenario, built.sim, built.options);
    if (result.records.empty()) {
        std::cerr << "error: run produced no records (" << result.message << ")\n";
        return 4;
    }
    const auto summary = verify_all(result.records, built.scenario);
    const int code = exit_status(result.status, summary);

    const auto csv = pick(f.csv, config.trajectory_path, f.out_dir, config.name + ".csv");
    const auto json = pick(f.summary, config.summary_path, f.out_dir, config.name + ".summary.json");
    std::filesystem::create_directories(std::filesystem::absolute(csv).parent_path());
    std::filesystem::create_directories(std::filesystem::absolute(json).parent_path());
    write_csv(csv, result.records);
    std::ofstream(json) << summary_json(config.name, result, summary, code);
    const auto plot = f.plot_script.empty() ? config.plot_script_path : f.plot_script;
    if (!plot.empty()) std::ofstream(plot) << gnuplot_script(csv, 2, 2);

    if (!f.quiet) {
        print_events(result);
        std::cout << describe(summary);
        std::cout << "trajectory        " << csv << "\nsummary           " << json << '\n';
    }
    std::cout << config.name << ": exit " << code;
    if (result.events.infeasible_at) std::cout << " (infeasible safeguard at t=" << *result.events.infeasible_at << ")";
    else if (summary.safety.first_violation) std::cout << " (safety violated at t=" << *summary.safety.first_violation << ")";
    std::cout << '\n';
    return code;
}

ScenarioConfig config_or_demo(const std::string& target) {
    if (std::filesystem::exists(target)) return load_config(target);
    for (const auto& name : demo_names())
        if (name == target) return demo_config(target);
    throw ConfigError("'" + target + "' is neither a readable config file nor a demo name");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe sliding mode control simulator"};
    app.require_subcommand(1);

    OutputFlags run_flags;
    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
    run_cmd->add_option("config", config_path, "Scenario YAML")->required();
    add_output_flags(run_cmd, run_flags);

    OutputFlags demo_flags;
    std::string demo_name, write_config;
    auto* demo_cmd = app.add_subcommand("demo", "Run a built-in scenario");
    demo_cmd->add_option("name", demo_name, "Demo name")->required()->check(CLI::IsMember(demo_names()));
    demo_cmd->add_option("--write-config", write_config, "Write the demo's scenario file here and exit");
    add_output_flags(demo_cmd, demo_flags);

    std::string sweep_target, sweep_param, sweep_out;
    std::vector<double> sweep_values;
    bool sweep_serial_flag = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one tuning parameter");
    sweep_cmd->add_option("config", sweep_target, "Scenario YAML or demo name")->required();
    sweep_cmd->add_option("--param", sweep_param, "h1, h2, h3, c_z, lambda, z0, h_bar or dt")->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',');
    sweep_cmd->add_option("--table", sweep_out, "Also write the table to this file");
    sweep_cmd->add_flag("--serial", sweep_serial_flag, "Run sequentially");

    std::string verify_config, verify_csv;
    auto* verify_cmd = app.add_subcommand("verify", "Re-run the monitors on a trajectory CSV");
    verify_cmd->add_option("config", verify_config, "Scenario YAML or demo name")->required();
    verify_cmd->add_option("csv", verify_csv, "Trajectory CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run_cmd) return execute(load_config(config_path), run_flags);

        if (*demo_cmd) {
            const auto config = demo_config(demo_name);
            if (!write_config.empty()) {
                std::ofstream(write_config) << emit_config(config);
                return 0;
            }
            return execute(config, demo_flags);
        }

        if (*sweep_cmd) {
            if (sweep_values.empty()) {
                std::cerr << "error: sweep needs --values\n";
                return 1;
            }
            const auto base = config_or_demo(sweep_target);
            const auto rows = sweep_serial_flag ? sweep_serial(base, sweep_param, sweep_values)
                                                : sweep(base, sweep_param, sweep_values);
            const auto table = format_sweep_table(sweep_param, rows);
            std::cout << table;
            if (!sweep_out.empty()) std::ofstream(sweep_out) << table;
            return 0;
        }

        if (*verify_cmd) {
            const auto built = build(config_or_demo(verify_config));
            const auto records = read_csv(verify_csv);
            if (records.empty()) throw EmptyTrajectory();
            const auto summary = verify_all(records, built.scenario);
            std::cout << describe(summary);
            return exit_status(RunStatus::Completed, summary);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const InvalidScenario& e) {
        std::cerr << "error: " << e.what();
        return 1;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 1;
}
