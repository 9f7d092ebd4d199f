#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nperiodic/config.hpp"
#include "nperiodic/field.hpp"
#include "nperiodic/seed.hpp"
#include "nperiodic/solver.hpp"

namespace nperiodic {

struct RunResult {
    std::string label;
    BilinearSystem system;
    GivenParams given;
    SeedMode seed_mode = SeedMode::dispersion;
    UnknownVector x0;
    double c1_0 = 1.0, c2_0 = 1.0;  // configured integration-constant seeds
    DispersionSeed seed_info;
    LatticeTruncation trunc;
    SolveReport report;
    /// Present when tau at the solution is positive definite.
    std::optional<OracleCheck> oracle;
    double seconds = 0.0;

    bool converged() const { return report.status == SolveStatus::converged; }
    bool oracle_pass() const { return oracle && oracle->max_normalized < kOracleTol; }
};

/// Exit-code taxonomy of `solve`.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitOracleFail = 2,
    kExitNotConverged = 3,
};

int exit_code(const RunResult& r);

/// seed -> Gauss-Newton -> pointwise bilinear oracle.
RunResult solve_run(const RunConfig& cfg);

/// Writes <out_dir>/<label>.json and, if requested, the grid <out_dir>/<label>.csv.
/// Returns the paths written.
std::vector<std::filesystem::path> write_artifacts(const RunConfig& cfg, const RunResult& r);

/// Human-readable summary of a single run.
void print_summary(std::ostream& os, const RunResult& r);

/// Solved-parameter table, values rounded to 4 decimals.
struct TableOutput {
    std::string text;
    std::string csv;
};

TableOutput render_table(const std::vector<RunResult>& rows);

/// "%.4f" with negative zero printed as 0.0000.
std::string format4(double v);

}  // namespace nperiodic
