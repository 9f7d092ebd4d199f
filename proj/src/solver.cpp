#include "nperiodic/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace nperiodic {

void SolverConfig::validate() const {
    if (!(step_tol > 0) || !(residual_tol > 0) || max_iter <= 0 || !(singular_shift >= 0) ||
        !(singular_rel_threshold > 0) || !(divergence_cap > 0) || !(damping > 0) || stall_window < 0 ||
        !(stall_residual_tol > 0))
        throw std::invalid_argument("solver settings must be positive");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::singular_tau: return "singular_tau";
    }
    return "unknown";
}

SolveStatus parse_status(const std::string& s) {
    for (auto st : {SolveStatus::converged, SolveStatus::max_iter, SolveStatus::diverged, SolveStatus::singular_tau})
        if (to_string(st) == s) return st;
    throw std::invalid_argument("unknown solve status '" + s + "'");
}

namespace {

using StepFn = std::function<Eigen::VectorXd(const Eigen::MatrixXd& J, const Eigen::VectorXd& H, bool& shifted)>;

SolveReport iterate(const ResidualSystem& rs, const UnknownVector& x0, const SolverConfig& cfg, const StepFn& step) {
    cfg.validate();
    x0.check(rs.n());

    SolveReport rep;
    rep.x_final = x0;
    double best = std::numeric_limits<double>::infinity();

    Eigen::VectorXd x = x0.flat();
    Eigen::VectorXd h;
    Eigen::MatrixXd J;
    double last_step = std::numeric_limits<double>::infinity();
    int best_at = 0;

    for (int it = 0;; ++it) {
        const UnknownVector xv = UnknownVector::from_flat(rs.n(), x);
        try {
            rs.evaluate(xv, h, &J);
        } catch (const NotPositiveDefinite&) {
            rep.status = SolveStatus::singular_tau;
            break;
        }
        const double hn = h.norm();
        if (hn < best) {
            best = hn;
            best_at = it;
            rep.x_final = xv;
        }
        if (it > 0 && last_step < cfg.step_tol && hn < cfg.residual_tol) {
            rep.status = SolveStatus::converged;
            break;
        }
        if (cfg.stall_window > 0 && best <= cfg.stall_residual_tol && it - best_at >= cfg.stall_window) {
            rep.status = SolveStatus::converged;
            rep.stopped_at_floor = true;
            break;
        }
        if (it == cfg.max_iter) {
            rep.status = SolveStatus::max_iter;
            break;
        }

        bool shifted = false;
        const Eigen::VectorXd dx = step(J, h, shifted);
        if (shifted) ++rep.regularized_steps;
        last_step = dx.norm();
        rep.trace.push_back({it + 1, hn, last_step});
        ++rep.iterations;
        x -= cfg.damping * dx;

        if (!x.allFinite() || x.norm() > cfg.divergence_cap) {
            rep.status = SolveStatus::diverged;
            break;
        }
    }

    rep.h_norm = best;
    rep.degenerate_l_zero = true;
    for (double l : rep.x_final.l)
        if (std::abs(l) >= kLZeroThreshold) rep.degenerate_l_zero = false;
    return rep;
}

}  // namespace

SolveReport gauss_newton(const ResidualSystem& rs, const UnknownVector& x0, const SolverConfig& cfg) {
    return iterate(rs, x0, cfg, [&](const Eigen::MatrixXd& J, const Eigen::VectorXd& H, bool& shifted) {
        Eigen::MatrixXd normal = J.transpose() * J;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        const double lmax = ev.cwiseAbs().maxCoeff();
        shifted = !(ev.minCoeff() >= cfg.singular_rel_threshold * lmax) || lmax == 0.0;
        if (shifted) normal.diagonal().array() += cfg.singular_shift;
        return Eigen::VectorXd(normal.ldlt().solve(J.transpose() * H));
    });
}

SolveReport newton_square(const ResidualSystem& rs, const UnknownVector& x0, const SolverConfig& cfg) {
    if (rs.num_conditions() != rs.num_unknowns())
        throw DimensionError("Newton iteration needs a square system (N = 1), got " +
                             std::to_string(rs.num_conditions()) + " x " + std::to_string(rs.num_unknowns()));
    return iterate(rs, x0, cfg, [](const Eigen::MatrixXd& J, const Eigen::VectorXd& H, bool& shifted) {
        shifted = false;
        return Eigen::VectorXd(J.partialPivLu().solve(H));
    });
}

}  // namespace nperiodic
