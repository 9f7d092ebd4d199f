#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nperiodic/pipeline.hpp"

namespace nperiodic {

inline constexpr const char* kReportFormat = "nperiodic-report/1";

/// Report contents needed to re-evaluate a solve without its config.
struct LoadedReport {
    std::string label;
    BilinearSystem system;
    GivenParams given;
    LatticeTruncation trunc;
    UnknownVector solution;
    double h_norm = 0.0;
    SolveStatus status = SolveStatus::max_iter;
    OracleSampling oracle_sampling;
};

/// JSON text of a run. Doubles are written with round-trip precision.
std::string report_json(const RunResult& r, const OracleSampling& sampling);

void write_report(const std::filesystem::path& path, const RunResult& r, const OracleSampling& sampling);

/// Throws std::runtime_error with the path on I/O or schema errors.
LoadedReport read_report(const std::filesystem::path& path);

struct VerifyResult {
    double h_norm = 0.0;
    double h_drift = 0.0;  // |recomputed - stored|
    OracleCheck oracle;
    bool pass = false;
};

inline constexpr double kVerifyResidualTol = 1e-12;

VerifyResult verify_report(const LoadedReport& rep, double h_tol = kVerifyResidualTol);

}  // namespace nperiodic
