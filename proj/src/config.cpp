#include "nperiodic/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace nperiodic {

// ---------------------------------------------------------------------------
// Expressions

namespace {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    double parse() {
        const double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("bad expression '" + std::string(s_) + "': " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double sum() {
        double v = product();
        for (;;) {
            if (eat('+'))
                v += product();
            else if (eat('-'))
                v -= product();
            else
                return v;
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                v /= unary();
            } else {
                // implicit product: "2pi", "2(1+1)"
                skip();
                if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '('))
                    v *= unary();
                else
                    return v;
            }
        }
    }

    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return primary();
    }

    double primary() {
        skip();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view word = s_.substr(start, pos_ - start);
            if (word == "pi") return std::numbers::pi;
            fail("unknown symbol '" + std::string(word) + "'");
        }
        const std::string rest(s_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("expected a number");
        std::size_t used = static_cast<std::size_t>(end - rest.c_str());
        // strtod accepts "inf"/"nan" and hex; keep to plain decimals
        for (std::size_t i = 0; i < used; ++i) {
            const char c = rest[i];
            if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '-' ||
                  c == '+'))
                fail("expected a decimal number");
        }
        // "2e" followed by "pi" is not an exponent; strtod already handled that case.
        pos_ += used;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bool is_plain_number(const std::string& s, double& out) {
    const char* b = s.c_str();
    char* end = nullptr;
    out = std::strtod(b, &end);
    if (end == b) return false;
    while (*end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    return *end == '\0' && std::isfinite(out);
}

}  // namespace

double evaluate_expression(std::string_view text) {
    const double v = ExprParser(text).parse();
    if (!std::isfinite(v)) throw ConfigError("expression '" + std::string(text) + "' is not finite");
    return v;
}

SeedMode parse_seed_mode(std::string_view s) {
    if (s == "dispersion") return SeedMode::dispersion;
    if (s == "explicit") return SeedMode::explicit_x0;
    if (s == "warm-start" || s == "published-warm-start") return SeedMode::warm_start;
    throw ConfigError("unknown seed mode '" + std::string(s) + "' (dispersion, explicit, warm-start)");
}

std::string to_string(SeedMode m) {
    switch (m) {
        case SeedMode::dispersion: return "dispersion";
        case SeedMode::explicit_x0: return "explicit";
        case SeedMode::warm_start: return "warm-start";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// YAML reading

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& msg) const {
        std::ostringstream os;
        os << origin_;
        if (n.IsDefined() && n.Mark().line >= 0) os << ":" << n.Mark().line + 1;
        os << ": " << field << ": " << msg;
        throw ConfigError(os.str());
    }

    void allow_keys(const YAML::Node& map, const std::string& field, std::initializer_list<const char*> keys) const {
        if (!map.IsMap()) fail(map, field, "expected a mapping");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
        }
    }

    double scalar(const YAML::Node& n, const std::string& field) const {
        if (!n.IsScalar()) fail(n, field, "expected a number or expression");
        try {
            return evaluate_expression(n.Scalar());
        } catch (const ConfigError& e) {
            fail(n, field, e.what());
        }
    }

    int integer(const YAML::Node& n, const std::string& field) const {
        const double v = scalar(n, field);
        if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, field, "expected an integer");
        return static_cast<int>(v);
    }

    bool boolean(const YAML::Node& n, const std::string& field) const {
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            fail(n, field, "expected true or false");
        }
    }

    std::string string(const YAML::Node& n, const std::string& field) const {
        if (!n.IsScalar()) fail(n, field, "expected a string");
        return n.Scalar();
    }

    std::vector<double> vector(const YAML::Node& n, const std::string& field) const {
        if (n.IsScalar()) return {scalar(n, field)};
        if (!n.IsSequence()) fail(n, field, "expected a list");
        std::vector<double> v;
        for (std::size_t i = 0; i < n.size(); ++i) v.push_back(scalar(n[i], field + "[" + std::to_string(i) + "]"));
        return v;
    }

    // Plain numbers are multiples of 2 pi; expressions are taken literally.
    std::vector<double> tau_vector(const YAML::Node& n, const std::string& field) const {
        std::vector<YAML::Node> items;
        if (n.IsScalar())
            items.push_back(n);
        else if (n.IsSequence())
            for (std::size_t i = 0; i < n.size(); ++i) items.push_back(n[i]);
        else
            fail(n, field, "expected a list");
        std::vector<double> v;
        for (std::size_t i = 0; i < items.size(); ++i) {
            double plain;
            if (items[i].IsScalar() && is_plain_number(items[i].Scalar(), plain))
                v.push_back(plain * 2.0 * std::numbers::pi);
            else
                v.push_back(scalar(items[i], field + "[" + std::to_string(i) + "]"));
        }
        return v;
    }

    BilinearForm form(const YAML::Node& n, const std::string& field) const {
        allow_keys(n, field, {"terms", "constant"});
        const bool constant = n["constant"] ? boolean(n["constant"], field + ".constant") : true;
        const YAML::Node terms = n["terms"];
        if (!terms || !terms.IsSequence()) fail(n, field + ".terms", "expected a list of [coefficient, [t, z, x]]");
        std::vector<Term> out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string f = field + ".terms[" + std::to_string(i) + "]";
            const YAML::Node t = terms[i];
            if (!t.IsSequence() || t.size() != 2 || !t[1].IsSequence() || t[1].size() != kNumVars)
                fail(t, f, "expected [coefficient, [t, z, x]]");
            Term term;
            try {
                term.coeff.ratio = Rational::parse(string(t[0], f));
            } catch (const FormError& e) {
                fail(t[0], f, e.what());
            }
            for (std::size_t v = 0; v < kNumVars; ++v) term.exponents[v] = integer(t[1][v], f);
            out.push_back(term);
        }
        try {
            return BilinearForm(std::move(out), constant);
        } catch (const FormError& e) {
            fail(n, field, e.what());
        }
    }

    BilinearSystem system(const YAML::Node& n, double v0) const {
        if (!n) fail(n, "equation", "missing");
        if (n.IsScalar()) {
            try {
                return builtin_system(n.Scalar(), v0);
            } catch (const std::invalid_argument& e) {
                fail(n, "equation", e.what());
            }
        }
        allow_keys(n, "equation", {"name", "f1", "f2"});
        if (!n["f1"] || !n["f2"]) fail(n, "equation", "custom equations need both f1 and f2");
        BilinearSystem s;
        s.name = n["name"] ? string(n["name"], "equation.name") : "custom";
        s.f1 = form(n["f1"], "equation.f1");
        s.f2 = form(n["f2"], "equation.f2");
        return s;
    }

    Axis axis(const YAML::Node& n, const std::string& field) const {
        if (!n.IsSequence() || n.size() != 3) fail(n, field, "expected [min, max, count]");
        Axis a{scalar(n[0], field), scalar(n[1], field), integer(n[2], field)};
        if (a.count < 1) fail(n, field, "count must be positive");
        return a;
    }

    RunConfig run(const YAML::Node& root) const {
        allow_keys(root, "",
                   {"label", "equation", "v0", "u0", "n", "k", "tau_diag", "seed", "solver", "truncation", "rng_seed",
                    "output", "grid", "oracle"});
        RunConfig cfg;
        if (root["label"]) cfg.label = string(root["label"], "label");
        cfg.given.v0 = root["v0"] ? scalar(root["v0"], "v0") : 0.0;
        cfg.given.u0 = root["u0"] ? scalar(root["u0"], "u0") : 0.0;
        cfg.system = system(root["equation"], cfg.given.v0);

        if (!root["k"]) fail(root, "k", "missing");
        if (!root["tau_diag"]) fail(root, "tau_diag", "missing");
        cfg.given.k = vector(root["k"], "k");
        cfg.given.tau_diag = tau_vector(root["tau_diag"], "tau_diag");
        const int n = static_cast<int>(cfg.given.k.size());
        if (root["n"] && integer(root["n"], "n") != n) fail(root["n"], "n", "does not match the length of k");
        if (static_cast<int>(cfg.given.tau_diag.size()) != n)
            fail(root["tau_diag"], "tau_diag", "length must equal the length of k");
        if (n < 1 || n > 6) fail(root["k"], "k", "between 1 and 6 waves are supported");
        try {
            cfg.given.validate();
        } catch (const std::exception& e) {
            fail(root["tau_diag"], "tau_diag", e.what());
        }

        if (root["rng_seed"]) {
            const double s = scalar(root["rng_seed"], "rng_seed");
            if (s < 0 || s != std::floor(s)) fail(root["rng_seed"], "rng_seed", "expected a non-negative integer");
            cfg.seed.rng_seed = static_cast<std::uint64_t>(s);
        }
        if (const YAML::Node s = root["seed"]) {
            allow_keys(s, "seed", {"mode", "c1", "c2", "tau_off", "root", "values"});
            if (s["mode"]) {
                try {
                    cfg.seed.mode = parse_seed_mode(string(s["mode"], "seed.mode"));
                } catch (const ConfigError& e) {
                    fail(s["mode"], "seed.mode", e.what());
                }
            }
            if (s["c1"]) cfg.seed.c1_0 = scalar(s["c1"], "seed.c1");
            if (s["c2"]) cfg.seed.c2_0 = scalar(s["c2"], "seed.c2");
            if (s["root"]) cfg.seed.root_index = integer(s["root"], "seed.root");
            if (s["tau_off"]) {
                cfg.seed.tau_off_0 = vector(s["tau_off"], "seed.tau_off");
                if (static_cast<int>(cfg.seed.tau_off_0.size()) != UnknownVector::off_diagonal_count(n))
                    fail(s["tau_off"], "seed.tau_off", "expected N(N-1)/2 entries");
            }
            if (const YAML::Node v = s["values"]) {
                allow_keys(v, "seed.values", {"omega", "l", "tau_off", "c1", "c2"});
                UnknownVector x = UnknownVector::zeros(n);
                if (!v["omega"] || !v["l"] || !v["c1"] || !v["c2"])
                    fail(v, "seed.values", "omega, l, c1 and c2 are required");
                x.omega = vector(v["omega"], "seed.values.omega");
                x.l = vector(v["l"], "seed.values.l");
                if (v["tau_off"]) x.tau_off = vector(v["tau_off"], "seed.values.tau_off");
                x.c1 = scalar(v["c1"], "seed.values.c1");
                x.c2 = scalar(v["c2"], "seed.values.c2");
                try {
                    x.check(n);
                } catch (const DimensionError& e) {
                    fail(v, "seed.values", e.what());
                }
                cfg.seed.x0 = x;
            }
            if (cfg.seed.mode != SeedMode::dispersion && !cfg.seed.x0)
                fail(s, "seed.values", "required for explicit and warm-start modes");
        }

        if (const YAML::Node s = root["solver"]) {
            allow_keys(s, "solver",
                       {"max_iter", "step_tol", "residual_tol", "singular_shift", "singular_rel_threshold",
                        "divergence_cap", "damping", "stall_window", "stall_residual_tol"});
            auto& sc = cfg.solver;
            if (s["max_iter"]) sc.max_iter = integer(s["max_iter"], "solver.max_iter");
            if (s["step_tol"]) sc.step_tol = scalar(s["step_tol"], "solver.step_tol");
            if (s["residual_tol"]) sc.residual_tol = scalar(s["residual_tol"], "solver.residual_tol");
            if (s["singular_shift"]) sc.singular_shift = scalar(s["singular_shift"], "solver.singular_shift");
            if (s["singular_rel_threshold"])
                sc.singular_rel_threshold = scalar(s["singular_rel_threshold"], "solver.singular_rel_threshold");
            if (s["divergence_cap"]) sc.divergence_cap = scalar(s["divergence_cap"], "solver.divergence_cap");
            if (s["damping"]) sc.damping = scalar(s["damping"], "solver.damping");
            if (s["stall_window"]) sc.stall_window = integer(s["stall_window"], "solver.stall_window");
            if (s["stall_residual_tol"])
                sc.stall_residual_tol = scalar(s["stall_residual_tol"], "solver.stall_residual_tol");
            try {
                sc.validate();
            } catch (const std::exception& e) {
                fail(s, "solver", e.what());
            }
        }

        if (const YAML::Node t = root["truncation"]) {
            allow_keys(t, "truncation", {"tail_tol", "m_max"});
            if (t["tail_tol"]) cfg.tail_tol = scalar(t["tail_tol"], "truncation.tail_tol");
            if (!(cfg.tail_tol > 0)) fail(t, "truncation.tail_tol", "must be positive");
            if (t["m_max"]) {
                cfg.m_max = integer(t["m_max"], "truncation.m_max");
                if (*cfg.m_max < 1) fail(t["m_max"], "truncation.m_max", "must be at least 1");
            }
        }

        if (const YAML::Node g = root["grid"]) {
            allow_keys(g, "grid", {"x", "t", "z"});
            if (g["x"]) cfg.grid.x = axis(g["x"], "grid.x");
            if (g["t"]) cfg.grid.t = axis(g["t"], "grid.t");
            if (g["z"]) cfg.grid.z = scalar(g["z"], "grid.z");
        }

        if (const YAML::Node o = root["output"]) {
            allow_keys(o, "output", {"dir", "grid", "grid_format"});
            if (o["dir"]) cfg.out_dir = string(o["dir"], "output.dir");
            if (o["grid"]) cfg.write_grid = boolean(o["grid"], "output.grid");
            if (o["grid_format"]) {
                const auto f = string(o["grid_format"], "output.grid_format");
                if (f == "csv")
                    cfg.grid_format = GridFormat::csv;
                else if (f == "matrix")
                    cfg.grid_format = GridFormat::matrix;
                else
                    fail(o["grid_format"], "output.grid_format", "expected csv or matrix");
            }
        }

        if (const YAML::Node o = root["oracle"]) {
            allow_keys(o, "oracle", {"points", "t", "x", "z", "rng_seed"});
            if (o["points"]) cfg.oracle.points = integer(o["points"], "oracle.points");
            if (o["t"]) {
                auto v = vector(o["t"], "oracle.t");
                if (v.size() != 2) fail(o["t"], "oracle.t", "expected [min, max]");
                cfg.oracle.t_min = v[0];
                cfg.oracle.t_max = v[1];
            }
            if (o["x"]) {
                auto v = vector(o["x"], "oracle.x");
                if (v.size() != 2) fail(o["x"], "oracle.x", "expected [min, max]");
                cfg.oracle.x_min = v[0];
                cfg.oracle.x_max = v[1];
            }
            if (o["z"]) cfg.oracle.z = scalar(o["z"], "oracle.z");
            if (o["rng_seed"]) cfg.oracle.rng_seed = static_cast<std::uint64_t>(integer(o["rng_seed"], "oracle.rng_seed"));
        }
        return cfg;
    }

private:
    std::string origin_;
};

// Maps merge recursively; anything else in `over` replaces `base`.
YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
    if (!base.IsMap() || !over.IsMap()) return YAML::Clone(over);
    YAML::Node out = YAML::Clone(base);
    for (const auto& kv : over) {
        const auto key = kv.first.as<std::string>();
        out[key] = out[key] ? merge(out[key], kv.second) : YAML::Clone(kv.second);
    }
    return out;
}

YAML::Node load_yaml(std::string_view text, const std::string& origin) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view yaml_text, const std::string& origin) {
    const YAML::Node root = load_yaml(yaml_text, origin);
    if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
    return Reader(origin).run(root);
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(slurp(path), path.string()); }

BatchConfig parse_batch_config(std::string_view yaml_text, const std::string& origin) {
    const YAML::Node root = load_yaml(yaml_text, origin);
    Reader reader(origin);
    if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
    reader.allow_keys(root, "", {"defaults", "rows"});
    const YAML::Node defaults = root["defaults"] ? root["defaults"] : YAML::Node(YAML::NodeType::Map);
    const YAML::Node rows = root["rows"];
    if (!rows || !(rows.IsSequence() || rows.IsNull())) reader.fail(root, "rows", "expected a list of runs");
    BatchConfig batch;
    if (rows.IsNull()) return batch;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        RunConfig cfg = reader.run(merge(defaults, rows[i]));
        if (!rows[i]["label"]) cfg.label = "row" + std::to_string(i + 1);
        batch.rows.push_back(std::move(cfg));
    }
    return batch;
}

BatchConfig load_batch_config(const std::filesystem::path& path) {
    return parse_batch_config(slurp(path), path.string());
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.seed_mode) {
        if (*o.seed_mode != SeedMode::dispersion && !cfg.seed.x0)
            throw ConfigError(cfg.label + ": --seed-mode " + to_string(*o.seed_mode) + " needs seed.values");
        cfg.seed.mode = *o.seed_mode;
    }
    if (o.rng_seed) cfg.seed.rng_seed = *o.rng_seed;
    if (o.max_iter) {
        if (*o.max_iter < 1) throw ConfigError("--max-iter must be positive");
        cfg.solver.max_iter = *o.max_iter;
    }
    if (o.trunc_m) {
        if (*o.trunc_m < 1) throw ConfigError("--trunc-m must be at least 1");
        cfg.m_max = *o.trunc_m;
    }
}

}  // namespace nperiodic
