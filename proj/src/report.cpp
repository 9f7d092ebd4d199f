#include "nperiodic/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace nperiodic {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json form_json(const BilinearForm& f) {
    json terms = json::array();
    for (const Term& t : f.terms())
        terms.push_back({{"ratio", {t.coeff.ratio.num, t.coeff.ratio.den}},
                         {"scale", t.coeff.scale},
                         {"exponents", {t.exponents[0], t.exponents[1], t.exponents[2]}}});
    return {{"constant", f.has_constant()}, {"terms", terms}};
}

BilinearForm form_from_json(const json& j) {
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
        Term term;
        term.coeff.ratio = Rational(t.at("ratio").at(0).get<std::int64_t>(), t.at("ratio").at(1).get<std::int64_t>());
        term.coeff.scale = t.at("scale").get<double>();
        for (std::size_t v = 0; v < kNumVars; ++v) term.exponents[v] = t.at("exponents").at(v).get<int>();
        terms.push_back(term);
    }
    return BilinearForm(std::move(terms), j.at("constant").get<bool>());
}

json unknown_json(const UnknownVector& x) {
    return {{"omega", x.omega}, {"l", x.l}, {"tau_off", x.tau_off}, {"c1", x.c1}, {"c2", x.c2}};
}

UnknownVector unknown_from_json(const json& j) {
    UnknownVector x;
    x.omega = j.at("omega").get<std::vector<double>>();
    x.l = j.at("l").get<std::vector<double>>();
    x.tau_off = j.at("tau_off").get<std::vector<double>>();
    x.c1 = j.at("c1").get<double>();
    x.c2 = j.at("c2").get<double>();
    return x;
}

}  // namespace

std::string report_json(const RunResult& r, const OracleSampling& sampling) {
    const auto& rep = r.report;
    json trace = json::array();
    for (const auto& e : rep.trace) trace.push_back({e.iteration, e.h_norm, e.step_norm});

    json j;
    j["format"] = kReportFormat;
    j["label"] = r.label;
    j["equation"] = {{"name", r.system.name}, {"f1", form_json(r.system.f1)}, {"f2", form_json(r.system.f2)}};
    j["given"] = {{"k", r.given.k}, {"tau_diag", r.given.tau_diag}, {"v0", r.given.v0}, {"u0", r.given.u0}};
    j["truncation"] = {{"m_max", r.trunc.m_max}, {"tail_tol", r.trunc.tail_tol}};
    j["seed"] = {{"mode", to_string(r.seed_mode)},
                 {"x0", unknown_json(r.x0)},
                 {"fallback", r.seed_info.fallback}};
    j["solution"] = unknown_json(rep.x_final);
    j["h_norm"] = finite_or_null(rep.h_norm);
    j["iterations"] = rep.iterations;
    j["status"] = to_string(rep.status);
    j["stopped_at_floor"] = rep.stopped_at_floor;
    j["regularized_steps"] = rep.regularized_steps;
    j["degenerate_l_zero"] = rep.degenerate_l_zero;
    j["trace"] = trace;
    j["oracle_sampling"] = {{"points", sampling.points},
                            {"t", {sampling.t_min, sampling.t_max}},
                            {"x", {sampling.x_min, sampling.x_max}},
                            {"z", sampling.z},
                            {"rng_seed", sampling.rng_seed}};
    if (r.oracle)
        j["oracle"] = {{"max_normalized", r.oracle->max_normalized},
                       {"max_imag", r.oracle->max_imag},
                       {"points", r.oracle->points},
                       {"threshold", kOracleTol},
                       {"pass", r.oracle_pass()}};
    else
        j["oracle"] = nullptr;
    j["seconds"] = r.seconds;
    return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const RunResult& r, const OracleSampling& sampling) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << report_json(r, sampling);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

LoadedReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report '" + path.string() + "'");
    try {
        const json j = json::parse(in);
        if (j.at("format").get<std::string>() != kReportFormat)
            throw std::runtime_error("unsupported report format");
        LoadedReport rep;
        rep.label = j.at("label").get<std::string>();
        const auto& eq = j.at("equation");
        rep.system.name = eq.at("name").get<std::string>();
        rep.system.f1 = form_from_json(eq.at("f1"));
        rep.system.f2 = form_from_json(eq.at("f2"));
        const auto& g = j.at("given");
        rep.given.k = g.at("k").get<std::vector<double>>();
        rep.given.tau_diag = g.at("tau_diag").get<std::vector<double>>();
        rep.given.v0 = g.at("v0").get<double>();
        rep.given.u0 = g.at("u0").get<double>();
        rep.given.validate();
        rep.trunc.m_max = j.at("truncation").at("m_max").get<int>();
        rep.trunc.tail_tol = j.at("truncation").at("tail_tol").get<double>();
        rep.solution = unknown_from_json(j.at("solution"));
        rep.solution.check(rep.given.n());
        rep.h_norm = number_or_inf(j.at("h_norm"));
        rep.status = parse_status(j.at("status").get<std::string>());
        if (j.contains("oracle_sampling")) {
            const auto& s = j.at("oracle_sampling");
            rep.oracle_sampling.points = s.at("points").get<int>();
            rep.oracle_sampling.t_min = s.at("t").at(0).get<double>();
            rep.oracle_sampling.t_max = s.at("t").at(1).get<double>();
            rep.oracle_sampling.x_min = s.at("x").at(0).get<double>();
            rep.oracle_sampling.x_max = s.at("x").at(1).get<double>();
            rep.oracle_sampling.z = s.at("z").get<double>();
            rep.oracle_sampling.rng_seed = s.at("rng_seed").get<std::uint64_t>();
        }
        return rep;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed report '" + path.string() + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("invalid report '" + path.string() + "': " + e.what());
    }
}

VerifyResult verify_report(const LoadedReport& rep, double h_tol) {
    VerifyResult v;
    const ResidualSystem rs(rep.system, rep.given, rep.trunc);
    v.h_norm = rs.eval_H(rep.solution).norm();
    v.h_drift = std::isfinite(rep.h_norm) ? std::abs(v.h_norm - rep.h_norm) : std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd tau = assemble_tau(rep.given, rep.solution);
    const BilinearOracle oracle(rep.system, make_theta_params(rep.given, rep.solution), rep.solution.c1,
                                rep.solution.c2, choose_truncation(tau, rep.trunc.tail_tol, false));
    v.oracle = check_oracle(oracle, rep.oracle_sampling);
    v.pass = v.h_norm <= h_tol && v.oracle.max_normalized < kOracleTol;
    return v;
}

}  // namespace nperiodic
