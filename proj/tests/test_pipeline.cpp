#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "nperiodic/config.hpp"
#include "nperiodic/pipeline.hpp"
#include "nperiodic/report.hpp"

using namespace nperiodic;

namespace {

const char* kTable1Row1 = R"(
label: t1r1
equation: coupled-ramani
k: ["1*2pi/10"]
tau_diag: [0.46]
seed: {mode: dispersion, c1: 1, c2: 1}
)";

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "nperiodic-tests" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("solve, report and verify round trip") {
        auto cfg = parse_run_config(kTable1Row1);
        cfg.out_dir = fresh_dir("roundtrip");
        cfg.write_grid = true;
        cfg.grid.x = {0, 20, 21};
        cfg.grid.t = {0, 50, 11};
        const auto r = solve_run(cfg);
        CHECK(r.converged());
        CHECK(r.oracle_pass());
        CHECK(exit_code(r) == kExitOk);
        CHECK(r.report.x_final.omega[0] == doctest::Approx(0.1424).epsilon(5e-4 / 0.1424));

        const auto written = write_artifacts(cfg, r);
        REQUIRE(written.size() == 2);
        CHECK(std::filesystem::exists(cfg.out_dir / "t1r1.json"));
        CHECK(std::filesystem::exists(cfg.out_dir / "t1r1.csv"));

        const auto rep = read_report(cfg.out_dir / "t1r1.json");
        CHECK(rep.solution == r.report.x_final);
        CHECK(rep.system == r.system);
        CHECK(rep.h_norm == r.report.h_norm);
        const auto v = verify_report(rep);
        CHECK(v.pass);
        CHECK(v.h_drift == 0.0);

        auto bumped = rep;
        bumped.solution.omega[0] += 1e-3;
        const auto bad = verify_report(bumped);
        CHECK_FALSE(bad.pass);
        CHECK(bad.h_norm > 1e-6);

        CHECK_THROWS_AS(read_report(cfg.out_dir / "missing.json"), std::runtime_error);
        std::ofstream(cfg.out_dir / "junk.json") << "{\"format\": 3}";
        CHECK_THROWS_AS(read_report(cfg.out_dir / "junk.json"), std::runtime_error);
    }

    TEST_CASE("identical runs write identical reports apart from timing") {
        const auto cfg = parse_run_config(kTable1Row1);
        auto a = solve_run(cfg);
        auto b = solve_run(cfg);
        a.seconds = b.seconds = 0.0;
        CHECK(report_json(a, cfg.oracle) == report_json(b, cfg.oracle));
        const auto j = nlohmann::json::parse(report_json(a, cfg.oracle));
        CHECK(j["status"] == "converged");
        CHECK(j["format"] == kReportFormat);
    }

    TEST_CASE("non-convergence maps to its exit code") {
        auto cfg = parse_run_config(kTable1Row1);
        cfg.solver.max_iter = 1;
        cfg.solver.stall_window = 0;
        const auto r = solve_run(cfg);
        CHECK_FALSE(r.converged());
        CHECK(exit_code(r) == kExitNotConverged);
    }

    TEST_CASE("indefinite seed tau is reported without solving") {
        auto cfg = parse_run_config(R"(
equation: coupled-ramani
k: ["2pi/10", "4pi/10"]
tau_diag: [0.1, 0.1]
seed: {tau_off: [5]}
)");
        const auto r = solve_run(cfg);
        CHECK(r.report.status == SolveStatus::singular_tau);
        CHECK_FALSE(r.oracle);
        CHECK(exit_code(r) == kExitNotConverged);
    }

    TEST_CASE("table rendering") {
        const auto empty = render_table({});
        CHECK(std::count(empty.text.begin(), empty.text.end(), '\n') == 1);
        CHECK(empty.csv.rfind("label,N,v0,", 0) == 0);

        const auto batch = parse_batch_config(R"(
defaults:
  equation: coupled-ramani
  k: ["1*2pi/10", "2*2pi/10"]
  seed: {mode: warm-start}
rows:
  - label: t3-r1
    tau_diag: [0.96, 1.23]
    seed: {values: {omega: [0.3556, -1.9620], l: [0.0313, 3.0793], tau_off: [0.9060], c1: 0.0460, c2: 0.0651}}
  - label: t3-r3
    tau_diag: [0.52, 1.13]
    seed: {c2: -1, values: {omega: [-0.2612, -0.8778], l: [0, 0], tau_off: [-0.5938], c1: 0.3925, c2: 0}}
)");
        std::vector<RunResult> results;
        for (const auto& row : batch.rows) results.push_back(solve_run(row));
        const auto t = render_table(results);
        CHECK(t.csv.find("t3-r1,2,0.0000,0.6283,1.2566,0.9600,1.2300,1.0000,1.0000,0.3556,-1.9620,0.0313,3.0793,"
                         "0.9060,0.0460,0.0651,") != std::string::npos);
        CHECK(t.csv.find("t3-r3,2,0.0000,0.6283,1.2566,0.5200,1.1300,1.0000,-1.0000,-0.2612,-0.8778,0.0000,0.0000,"
                         "-0.5938,0.3925,0.0000,") != std::string::npos);
        CHECK(t.csv.find(",converged,yes\n") != std::string::npos);
        CHECK(format4(-0.00001) == "0.0000");
        CHECK(format4(1.23456) == "1.2346");
    }
}
