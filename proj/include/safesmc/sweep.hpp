#pragma once

// One-parameter sweeps. Each value gets its own independent run; runs are
// spread over OpenMP threads and the table is assembled in input order.

#include "safesmc/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace safesmc {

struct SweepRow {
    double value = 0.0;
    int exit_code = 0;
    std::string status;     // run status, or "invalid" when the scenario was rejected
    std::string message;
    double min_h = 0.0;
    std::optional<double> reach_time;
    std::size_t resets = 0;
    double us_l1 = 0.0;

    bool operator==(const SweepRow&) const = default;
};

/// Throws ConfigError for an unknown parameter or an empty value list.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& parameter, const std::vector<double>& values);
/// Single-threaded reference; same rows as sweep().
std::vector<SweepRow> sweep_serial(const ScenarioConfig& base, const std::string& parameter,
                                   const std::vector<double>& values);

/// Runs one configuration end to end (build, simulate, verify).
SweepRow sweep_point(const ScenarioConfig& config, double value);

std::string format_sweep_table(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace safesmc
