#include "safesmc/trajectory_io.hpp"

#include "safesmc/config.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace safesmc {

std::string csv_header(std::size_t n, std::size_t p) {
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    out << ",z";
    for (std::size_t i = 1; i <= p; ++i) out << ",s" << i;
    for (std::size_t i = 1; i <= p; ++i) out << ",usmc" << i;
    out << ",us";
    for (std::size_t i = 1; i <= p; ++i) out << ",u" << i;
    out << ",h,h_upsilon,V_smc,V_z,V_total,mode,reset";
    return out.str();
}

void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    const std::size_t n = records.empty() ? 0 : static_cast<std::size_t>(records.front().x.size());
    const std::size_t p = records.empty() ? 0 : static_cast<std::size_t>(records.front().s.size());
    out << csv_header(n, p) << '\n';

    std::string line;
    auto put = [&line](double v) {
        line += format_double(v);
        line += ',';
    };
    for (const auto& r : records) {
        line.clear();
        put(r.t);
        for (double v : r.x) put(v);
        put(r.z);
        for (double v : r.s) put(v);
        for (double v : r.u_smc) put(v);
        put(r.u_s);
        for (double v : r.u) put(v);
        put(r.h);
        put(r.h_upsilon);
        put(r.V_smc);
        put(r.V_z);
        put(r.V_total);
        line += to_string(r.mode);
        line += r.reset_flag ? ",1\n" : ",0\n";
        out << line;
    }
}

void write_csv(const std::string& path, const std::vector<TrajectoryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write '" + path + "'");
    write_csv(out, records);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& text, std::size_t row) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw CsvError("row " + std::to_string(row) + ": bad number '" + text + "'");
    return v;
}

std::size_t count_prefix(const std::vector<std::string>& cols, const std::string& prefix) {
    std::size_t k = 0;
    while (true) {
        const std::string want = prefix + std::to_string(k + 1);
        bool found = false;
        for (const auto& c : cols)
            if (c == want) found = true;
        if (!found) return k;
        ++k;
    }
}

}  // namespace

std::vector<TrajectoryRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("missing header");
    const auto cols = split(line);
    const std::size_t n = count_prefix(cols, "x");
    const std::size_t p = count_prefix(cols, "s");
    if (line != csv_header(n, p)) throw CsvError("unexpected header '" + line + "'");

    std::vector<TrajectoryRecord> records;
    const auto ni = static_cast<Eigen::Index>(n), pi = static_cast<Eigen::Index>(p);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != cols.size()) throw CsvError("row " + std::to_string(row) + ": wrong column count");
        std::size_t k = 0;
        auto next = [&] { return parse_double(f[k++], row); };
        auto vec = [&](Eigen::Index size) {
            Vector v(size);
            for (Eigen::Index i = 0; i < size; ++i) v(i) = next();
            return v;
        };
        TrajectoryRecord r;
        r.t = next();
        r.x = vec(ni);
        r.z = next();
        r.s = vec(pi);
        r.u_smc = vec(pi);
        r.u_s = next();
        r.u = vec(pi);
        r.h = next();
        r.h_upsilon = next();
        r.V_smc = next();
        r.V_z = next();
        r.V_total = next();
        const auto mode = parse_mode(f[k++]);
        if (!mode) throw CsvError("row " + std::to_string(row) + ": bad mode '" + f[k - 1] + "'");
        r.mode = *mode;
        const auto& flag = f[k];
        if (flag != "0" && flag != "1") throw CsvError("row " + std::to_string(row) + ": bad reset flag");
        r.reset_flag = flag == "1";
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<TrajectoryRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot read '" + path + "'");
    return read_csv(in);
}

std::string summary_json(const std::string& name, const RunResult& run, const VerifySummary& v, int exit_code) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };

    json events = {
        {"t1", opt(run.events.t1)},
        {"reset_times", run.events.reset_times},
        {"t_omega", opt(run.events.t_omega)},
        {"infeasible_at", opt(run.events.infeasible_at)},
        {"min_h", run.events.min_h},
        {"reach_time", opt(run.events.reach_time)},
        {"fallback_times", run.events.fallback_times},
    };
    json lyapunov_violations = json::array();
    for (const auto& viol : v.lyapunov.violations)
        lyapunov_violations.push_back({{"t", viol.t}, {"rate", viol.rate}, {"bound", viol.bound}});

    json verify = {
        {"safety", {{"passed", v.safety.passed()}, {"min_h", v.safety.min_h},
                    {"first_violation", opt(v.safety.first_violation)}}},
        {"inequality", {{"passed", v.inequality.passed()}, {"vacuous", v.inequality.vacuous()},
                        {"samples", v.inequality.samples}, {"min_residual", v.inequality.min_residual}}},
        {"barrier", {{"passed", v.barrier.passed()}, {"min_residual", v.barrier.min_residual},
                     {"tolerance", v.barrier.tolerance}, {"samples", v.barrier.samples},
                     {"excluded_resets", v.barrier.excluded_resets}}},
        {"lyapunov", {{"passed", v.lyapunov.passed()}, {"exempt", v.lyapunov.exempt},
                      {"samples", v.lyapunov.samples}, {"excluded_band", v.lyapunov.excluded_band},
                      {"excluded_resets", v.lyapunov.excluded_resets}, {"violations", lyapunov_violations}}},
        {"upsilon_in_range", v.upsilon_in_range},
        {"reach_time", opt(v.reach_time)},
        {"reach_bound", v.reach_bound},
    };

    json out = {
        {"name", name},
        {"status", to_string(run.status)},
        {"message", run.message},
        {"exit_code", exit_code},
        {"channel", run.channel ? json(*run.channel + 1) : json(nullptr)},
        {"steps", run.metrics.steps},
        {"us_l1", run.metrics.us_l1},
        {"control_tv", run.metrics.control_tv},
        {"final_x", std::vector<double>(run.final_x.data(), run.final_x.data() + run.final_x.size())},
        {"final_z", run.final_z},
        {"events", events},
        {"verify", verify},
    };
    return out.dump(2) + "\n";
}

std::string gnuplot_script(const std::string& csv_path, std::size_t n, std::size_t p) {
    // Column numbers follow csv_header.
    const std::size_t z_col = n + 2;
    const std::size_t h_col = n + 3 * p + 4;
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set multiplot layout 3,1\n"
        << "set xlabel 't [s]'\n"
        << "plot '" << csv_path << "' using 1:" << h_col << " with lines\n"
        << "plot '" << csv_path << "' using 1:" << z_col << " with lines\n"
        << "plot '" << csv_path << "' using 1:" << h_col + 2 << " with lines, '' using 1:" << h_col + 3
        << " with lines, '' using 1:" << h_col + 4 << " with lines\n"
        << "unset multiplot\n";
    return out.str();
}

}  // namespace safesmc
