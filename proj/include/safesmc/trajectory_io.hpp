#pragma once

// Trajectory CSV and run summaries.
//
// CSV header: t,x1..xn,z,s1..sp,usmc1..usmcp,us,u1..up,h,h_upsilon,V_smc,V_z,V_total,mode,reset
// Floats are written in shortest round-trip form, so reading a file back
// yields bit-identical records. mode is PRE/ACTIVE/DONE, reset is 0/1.

#include "safesmc/sim.hpp"
#include "safesmc/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace safesmc {

class CsvError : public Error {
public:
    using Error::Error;
};

std::string csv_header(std::size_t n, std::size_t p);

void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_csv(const std::string& path, const std::vector<TrajectoryRecord>& records);

/// Dimensions are taken from the header. Throws CsvError on malformed input.
std::vector<TrajectoryRecord> read_csv(std::istream& in);
std::vector<TrajectoryRecord> read_csv(const std::string& path);

/// Machine-readable summary of one run (JSON).
std::string summary_json(const std::string& name, const RunResult& run, const VerifySummary& verify, int exit_code);

/// gnuplot script plotting the obstacle margin, z and the energies from a CSV.
std::string gnuplot_script(const std::string& csv_path, std::size_t n, std::size_t p);

}  // namespace safesmc
