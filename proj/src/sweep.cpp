#include "safesmc/sweep.hpp"

#include "safesmc/verify.hpp"

#include <iomanip>
#include <sstream>

namespace safesmc {

SweepRow sweep_point(const ScenarioConfig& config, double value) {
    SweepRow row;
    row.value = value;
    try {
        const auto built = build(config);
        const auto result = run(built.scenario, built.sim, built.options);
        row.status = to_string(result.status);
        row.message = result.message;
        row.min_h = result.events.min_h;
        row.reach_time = result.events.reach_time;
        row.resets = result.events.reset_times.size();
        row.us_l1 = result.metrics.us_l1;
        if (result.records.empty()) {
            row.exit_code = 4;
        } else {
            row.exit_code = exit_status(result.status, verify_all(result.records, built.scenario));
        }
    } catch (const std::exception& e) {
        row.status = "invalid";
        row.message = e.what();
        row.exit_code = 1;
    }
    return row;
}

namespace {

void check_request(const std::string& parameter, const std::vector<double>& values) {
    bool known = false;
    for (const auto& name : sweep_parameters()) known = known || name == parameter;
    if (!known) throw ConfigError("unknown sweep parameter '" + parameter + "'");
    if (values.empty()) throw ConfigError("sweep needs at least one value");
}

ScenarioConfig with_value(const ScenarioConfig& base, const std::string& parameter, double value) {
    auto config = base;
    set_parameter(config, parameter, value);
    return config;
}

}  // namespace

std::vector<SweepRow> sweep_serial(const ScenarioConfig& base, const std::string& parameter,
                                   const std::vector<double>& values) {
    check_request(parameter, values);
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) rows.push_back(sweep_point(with_value(base, parameter, v), v));
    return rows;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& parameter, const std::vector<double>& values) {
    check_request(parameter, values);
    std::vector<SweepRow> rows(values.size());
    const auto n = static_cast<long long>(values.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        rows[k] = sweep_point(with_value(base, parameter, values[k]), values[k]);
    }
    return rows;
}

std::string format_sweep_table(const std::string& parameter, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(12) << parameter << std::setw(14) << "min_h" << std::setw(12) << "reach_time"
        << std::setw(8) << "resets" << std::setw(14) << "int|u_s|dt" << std::setw(6) << "exit"
        << "status\n";
    out << std::setprecision(6);
    for (const auto& r : rows) {
        out << std::setw(12) << r.value << std::setw(14) << r.min_h << std::setw(12);
        if (r.reach_time) out << *r.reach_time;
        else out << "-";
        out << std::setw(8) << r.resets << std::setw(14) << r.us_l1 << std::setw(6) << r.exit_code << r.status;
        if (r.status == "invalid") out << " (" << r.message << ")";
        out << '\n';
    }
    return out.str();
}

}  // namespace safesmc
