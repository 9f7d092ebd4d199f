#include "nperiodic/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nperiodic/report.hpp"

namespace nperiodic {

int exit_code(const RunResult& r) {
    if (!r.converged()) return kExitNotConverged;
    return r.oracle_pass() ? kExitOk : kExitOracleFail;
}

RunResult solve_run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.label = cfg.label;
    r.system = cfg.system;
    r.given = cfg.given;
    r.seed_mode = cfg.seed.mode;
    r.c1_0 = cfg.seed.c1_0;
    r.c2_0 = cfg.seed.c2_0;
    r.x0 = build_initial_guess(cfg.system, cfg.given, cfg.seed, &r.seed_info);

    auto finish = [&]() -> RunResult {
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    };

    try {
        r.trunc = cfg.m_max ? LatticeTruncation{*cfg.m_max, cfg.tail_tol}
                            : choose_truncation(assemble_tau(cfg.given, r.x0), cfg.tail_tol, true);
    } catch (const NotPositiveDefinite&) {
        r.report.x_final = r.x0;
        r.report.status = SolveStatus::singular_tau;
        r.report.h_norm = std::numeric_limits<double>::infinity();
        return finish();
    }

    r.report = gauss_newton(ResidualSystem(cfg.system, cfg.given, r.trunc), r.x0, cfg.solver);

    Eigen::MatrixXd tau = assemble_tau(cfg.given, r.report.x_final);
    if (!cfg.m_max && r.report.status != SolveStatus::singular_tau) {
        try {
            const LatticeTruncation needed = choose_truncation(tau, cfg.tail_tol, true);
            if (needed.m_max > r.trunc.m_max) {
                r.trunc = needed;
                r.report = gauss_newton(ResidualSystem(cfg.system, cfg.given, r.trunc), r.report.x_final, cfg.solver);
                tau = assemble_tau(cfg.given, r.report.x_final);
            }
        } catch (const NotPositiveDefinite&) {
        }
    }

    try {
        const LatticeTruncation theta_trunc = choose_truncation(tau, cfg.tail_tol, false);
        const ThetaParams p = make_theta_params(cfg.given, r.report.x_final);
        const BilinearOracle oracle(cfg.system, p, r.report.x_final.c1, r.report.x_final.c2, theta_trunc);
        r.oracle = check_oracle(oracle, cfg.oracle);
    } catch (const NotPositiveDefinite&) {
    }
    return finish();
}

std::vector<std::filesystem::path> write_artifacts(const RunConfig& cfg, const RunResult& r) {
    std::vector<std::filesystem::path> written;
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());

    const auto report_path = cfg.out_dir / (r.label + ".json");
    write_report(report_path, r, cfg.oracle);
    written.push_back(report_path);

    if (cfg.write_grid) {
        const Eigen::MatrixXd tau = assemble_tau(r.given, r.report.x_final);
        const ThetaParams p = make_theta_params(r.given, r.report.x_final);
        const WaveGrid g = reconstruct(p, r.given, cfg.grid, choose_truncation(tau, cfg.tail_tol, false));
        const auto grid_path = cfg.out_dir / (r.label + ".csv");
        export_grid(g, cfg.grid_format, grid_path);
        written.push_back(grid_path);
    }
    return written;
}

namespace {

std::string sci(double v) {
    if (!std::isfinite(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string join(const std::vector<double>& v, int digits = 10) {
    std::ostringstream os;
    os.precision(digits);
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "]";
    return os.str();
}

}  // namespace

std::string format4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

void print_summary(std::ostream& os, const RunResult& r) {
    const auto& rep = r.report;
    const auto& x = rep.x_final;
    os << "run " << r.label << " (" << r.system.name << ", N=" << r.given.n() << ", v0=" << r.given.v0
       << ", seed=" << to_string(r.seed_mode) << ")\n";
    if (r.seed_info.any_fallback()) os << "  warning: no real dispersion root for some waves; used (k^3, k)\n";
    os << "  status      " << to_string(rep.status) << (rep.stopped_at_floor ? " (roundoff floor)" : "") << " after "
       << rep.iterations << " iterations, M=" << r.trunc.m_max << "\n";
    os << "  ||H||_2     " << sci(rep.h_norm) << "\n";
    os << "  omega       " << join(x.omega) << "\n";
    os << "  l           " << join(x.l) << "\n";
    if (!x.tau_off.empty()) os << "  tau_off     " << join(x.tau_off) << "\n";
    os << "  c1, c2      " << join({x.c1, x.c2}) << "\n";
    if (rep.degenerate_l_zero) os << "  l = 0 branch: theta is independent of z, v = v0\n";
    if (rep.regularized_steps > 0)
        os << "  J^T J was regularized on " << rep.regularized_steps << " iterations\n";
    if (r.oracle)
        os << "  oracle      max |F(D)theta.theta|/theta^2 = " << sci(r.oracle->max_normalized) << " over "
           << r.oracle->points << " points (" << (r.oracle_pass() ? "pass" : "FAIL") << ")\n";
    else
        os << "  oracle      not evaluated (tau not positive definite)\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
    os << "  time        " << buf << " s\n";
}

TableOutput render_table(const std::vector<RunResult>& rows) {
    int nmax = 0;
    for (const auto& r : rows) nmax = std::max(nmax, r.given.n());

    std::vector<std::string> header{"label", "N", "v0"};
    for (int j = 1; j <= nmax; ++j) header.push_back("k" + std::to_string(j));
    for (int j = 1; j <= nmax; ++j) header.push_back("tau" + std::to_string(j) + std::to_string(j) + "/2pi");
    header.insert(header.end(), {"c1_0", "c2_0"});
    for (int j = 1; j <= nmax; ++j) header.push_back("omega" + std::to_string(j));
    for (int j = 1; j <= nmax; ++j) header.push_back("l" + std::to_string(j));
    for (int i = 1; i <= nmax; ++i)
        for (int j = i + 1; j <= nmax; ++j) header.push_back("tau" + std::to_string(i) + std::to_string(j));
    header.insert(header.end(), {"c1", "c2", "||H||", "oracle", "status", "l=0"});

    std::vector<std::vector<std::string>> cells{header};
    for (const auto& r : rows) {
        const int n = r.given.n();
        const auto& x = r.report.x_final;
        std::vector<std::string> row{r.label, std::to_string(n), format4(r.given.v0)};
        auto pad_vec = [&](const std::vector<double>& v, double scale = 1.0) {
            for (int j = 0; j < nmax; ++j) row.push_back(j < n ? format4(v[j] / scale) : "");
        };
        pad_vec(r.given.k);
        pad_vec(r.given.tau_diag, 2.0 * std::numbers::pi);
        row.push_back(format4(r.c1_0));
        row.push_back(format4(r.c2_0));
        pad_vec(x.omega);
        pad_vec(x.l);
        for (int i = 0, idx = 0; i < nmax; ++i)
            for (int j = i + 1; j < nmax; ++j) {
                const bool have = i < n && j < n;
                row.push_back(have ? format4(x.tau_off[idx++]) : "");
            }
        row.push_back(format4(x.c1));
        row.push_back(format4(x.c2));
        row.push_back(sci(r.report.h_norm));
        row.push_back(r.oracle ? sci(r.oracle->max_normalized) : "-");
        std::string status = to_string(r.report.status);
        if (r.converged() && !r.oracle_pass()) status += "(oracle-fail)";
        row.push_back(status);
        row.push_back(r.report.degenerate_l_zero ? "yes" : "no");
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream text, csv;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                text << "  ";
                csv << ',';
            }
            if (c == 0) {
                text << row[c] << std::string(width[c] - row[c].size(), ' ');
            } else {
                text << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
            csv << row[c];
        }
        text << '\n';
        csv << '\n';
    }
    return {text.str(), csv.str()};
}

}  // namespace nperiodic
