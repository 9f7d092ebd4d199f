// Command-line front end: solve, table, verify, sample.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nperiodic/config.hpp"
#include "nperiodic/pipeline.hpp"
#include "nperiodic/report.hpp"

using namespace nperiodic;

namespace {

struct CommonFlags {
    std::string config;
    std::string out_dir;
    std::string seed_mode;
    std::optional<std::uint64_t> rng_seed;
    std::optional<int> max_iter;
    std::optional<int> trunc_m;

    void attach(CLI::App* app, bool config_required = true) {
        auto* opt = app->add_option("--config", config, "YAML run description");
        if (config_required) opt->required();
        app->add_option("--out-dir", out_dir, "Directory for reports and grids (overrides output.dir)");
        app->add_option("--seed-mode", seed_mode, "dispersion | explicit | warm-start");
        app->add_option("--rng-seed", rng_seed, "Seed for the dispersion start ladder");
        app->add_option("--max-iter", max_iter, "Gauss-Newton iteration limit");
        app->add_option("--trunc-m", trunc_m, "Fixed lattice bound M (default: chosen from tau)");
    }

    Overrides overrides() const {
        Overrides o;
        if (!out_dir.empty()) o.out_dir = out_dir;
        if (!seed_mode.empty()) o.seed_mode = parse_seed_mode(seed_mode);
        o.rng_seed = rng_seed;
        o.max_iter = max_iter;
        o.trunc_m = trunc_m;
        return o;
    }
};

Axis parse_axis(const std::string& s) {
    Axis a;
    char tail;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &a.min, &a.max, &a.count, &tail) != 3 || a.count < 1)
        throw ConfigError("axis '" + s + "' must look like min:max:count");
    return a;
}

int cmd_solve(const CommonFlags& flags, bool force_grid, bool quiet) {
    RunConfig cfg = load_run_config(flags.config);
    apply_overrides(cfg, flags.overrides());
    if (force_grid) cfg.write_grid = true;
    const RunResult r = solve_run(cfg);
    if (!quiet) print_summary(std::cout, r);
    for (const auto& p : write_artifacts(cfg, r)) std::cout << "wrote " << p.string() << "\n";
    return exit_code(r);
}

int cmd_table(const CommonFlags& flags) {
    BatchConfig batch = load_batch_config(flags.config);
    const Overrides o = flags.overrides();
    for (auto& row : batch.rows) apply_overrides(row, o);

    std::vector<RunResult> results;
    int worst = kExitOk;
    for (const auto& row : batch.rows) {
        try {
            results.push_back(solve_run(row));
            write_artifacts(row, results.back());
            const int code = exit_code(results.back());
            if (code == kExitNotConverged || worst == kExitOk) worst = std::max(worst, code);
        } catch (const std::exception& e) {
            std::cerr << row.label << ": " << e.what() << "\n";
            worst = kExitNotConverged;
        }
    }
    const TableOutput table = render_table(results);
    std::cout << table.text;

    const std::filesystem::path dir =
        !flags.out_dir.empty() ? std::filesystem::path(flags.out_dir)
                               : (batch.rows.empty() ? std::filesystem::path(".") : batch.rows.front().out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "table.txt") << table.text;
    std::ofstream(dir / "table.csv") << table.csv;
    std::cout << "wrote " << (dir / "table.txt").string() << " and " << (dir / "table.csv").string() << "\n";
    return worst;
}

int cmd_verify(const std::string& path, double h_tol) {
    const LoadedReport rep = read_report(path);
    const VerifyResult v = verify_report(rep, h_tol);
    std::printf("report   %s (%s, N=%d)\n", rep.label.c_str(), rep.system.name.c_str(), rep.given.n());
    std::printf("||H||_2  %.6e  (threshold %.1e, stored %.6e, drift %.1e)\n", v.h_norm, h_tol, rep.h_norm, v.h_drift);
    std::printf("oracle   %.6e  (threshold %.1e, %d points)\n", v.oracle.max_normalized, kOracleTol, v.oracle.points);
    std::printf("%s\n", v.pass ? "PASS" : "FAIL");
    return v.pass ? kExitOk : kExitOracleFail;
}

int cmd_sample(const CommonFlags& flags, const std::string& report_path, const std::string& x_axis,
               const std::string& t_axis) {
    if (!report_path.empty()) {
        const LoadedReport rep = read_report(report_path);
        GridSpec spec;
        if (!x_axis.empty()) spec.x = parse_axis(x_axis);
        if (!t_axis.empty()) spec.t = parse_axis(t_axis);
        const Eigen::MatrixXd tau = assemble_tau(rep.given, rep.solution);
        const WaveGrid g = reconstruct(make_theta_params(rep.given, rep.solution), rep.given, spec,
                                       choose_truncation(tau, rep.trunc.tail_tol, false));
        const std::filesystem::path dir = flags.out_dir.empty() ? "." : flags.out_dir;
        std::filesystem::create_directories(dir);
        const auto out = dir / (rep.label + ".csv");
        export_grid(g, GridFormat::csv, out);
        std::cout << "wrote " << out.string() << "\n";
        return kExitOk;
    }
    if (flags.config.empty()) throw ConfigError("sample needs --config or --report");
    RunConfig cfg = load_run_config(flags.config);
    apply_overrides(cfg, flags.overrides());
    if (!x_axis.empty()) cfg.grid.x = parse_axis(x_axis);
    if (!t_axis.empty()) cfg.grid.t = parse_axis(t_axis);
    cfg.write_grid = true;
    const RunResult r = solve_run(cfg);
    for (const auto& p : write_artifacts(cfg, r)) std::cout << "wrote " << p.string() << "\n";
    return exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-periodic wave solutions of coupled KdV-type bilinear systems"};
    app.require_subcommand(1);

    CommonFlags solve_flags, table_flags, sample_flags;
    bool solve_grid = false, solve_quiet = false;
    auto* solve = app.add_subcommand("solve", "Seed, solve and verify one configuration");
    solve_flags.attach(solve);
    solve->add_flag("--grid", solve_grid, "Also export the u, v grid");
    solve->add_flag("--quiet", solve_quiet, "Only print written paths");

    auto* table = app.add_subcommand("table", "Solve a batch of rows and print the parameter table");
    table_flags.attach(table);

    std::string report_path;
    double h_tol = kVerifyResidualTol;
    auto* verify = app.add_subcommand("verify", "Re-evaluate ||H|| and the bilinear oracle for a saved report");
    verify->add_option("report", report_path, "Report JSON written by solve")->required();
    verify->add_option("--h-tol", h_tol, "Residual threshold");

    std::string sample_report, x_axis, t_axis;
    auto* sample = app.add_subcommand("sample", "Export the u, v grid of a solution");
    sample_flags.attach(sample, false);
    sample->add_option("--report", sample_report, "Sample a saved report instead of solving");
    sample->add_option("--x", x_axis, "x axis as min:max:count");
    sample->add_option("--t", t_axis, "t axis as min:max:count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(solve_flags, solve_grid, solve_quiet);
        if (*table) return cmd_table(table_flags);
        if (*verify) return cmd_verify(report_path, h_tol);
        if (*sample) return cmd_sample(sample_flags, sample_report, x_axis, t_axis);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
