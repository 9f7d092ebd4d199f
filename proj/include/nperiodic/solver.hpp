#pragma once

#include <string>
#include <vector>

#include "nperiodic/residual.hpp"

namespace nperiodic {

struct SolverConfig {
    double step_tol = 1e-14;
    double residual_tol = 1e-14;
    int max_iter = 200;
    /// Identity shift added to J^T J when it is near singular.
    double singular_shift = 1e-6;
    /// J^T J counts as near singular when lambda_min < this * lambda_max.
    double singular_rel_threshold = 1e-10;
    double divergence_cap = 1e8;
    /// Step scale; 1 is the plain Gauss-Newton update. Extension knob.
    double damping = 1.0;
    /// Roundoff-floor stop: also converged once the best ||H|| is below
    /// stall_residual_tol and has not improved for stall_window iterations.
    /// stall_window = 0 disables it.
    int stall_window = 10;
    double stall_residual_tol = 1e-12;

    void validate() const;
};

enum class SolveStatus { converged, max_iter, diverged, singular_tau };

std::string to_string(SolveStatus s);
SolveStatus parse_status(const std::string& s);

struct TraceEntry {
    int iteration;
    double h_norm;
    double step_norm;
};

struct SolveReport {
    UnknownVector x_final;  // lowest-residual iterate seen
    double h_norm = 0.0;
    int iterations = 0;
    std::vector<TraceEntry> trace;
    SolveStatus status = SolveStatus::max_iter;
    bool degenerate_l_zero = false;
    /// Number of iterations on which the singularity shift was applied.
    int regularized_steps = 0;
    /// Converged through the roundoff-floor stop rather than the strict pair of tolerances.
    bool stopped_at_floor = false;
};

/// Threshold below which every |l_j| counts as zero.
inline constexpr double kLZeroThreshold = 1e-8;

/// x <- x - (J^T J)^{-1} J^T H, with J^T J shifted by singular_shift * I when
/// near singular. Stops when both ||dx|| < step_tol and ||H|| < residual_tol,
/// or at the roundoff floor (see SolverConfig::stall_window).
SolveReport gauss_newton(const ResidualSystem& rs, const UnknownVector& x0, const SolverConfig& cfg = {});

/// x <- x - J^{-1} H for the square N = 1 system. Throws DimensionError otherwise.
SolveReport newton_square(const ResidualSystem& rs, const UnknownVector& x0, const SolverConfig& cfg = {});

}  // namespace nperiodic
