#include "nperiodic/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace nperiodic {

namespace {

std::string point_string(const VarVector& p) {
    std::ostringstream os;
    os.precision(17);
    os << "(t=" << p[0] << ", z=" << p[1] << ", x=" << p[2] << ")";
    return os.str();
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

NonPositiveTheta::NonPositiveTheta(const VarVector& point, double value)
    : std::runtime_error("theta = " + format17(value) + " is not positive at " + point_string(point)),
      point_(point) {}

std::pair<double, double> fields_at(const ThetaSeries& series, const GivenParams& given, const VarVector& point) {
    const auto j = series.jet(point);
    if (!(j.f > 0.0)) throw NonPositiveTheta(point, j.f);
    const double f2 = j.f * j.f;
    return {given.u0 + (j.fxx * j.f - j.fx * j.fx) / f2, given.v0 + (j.fxz * j.f - j.fx * j.fz) / f2};
}

WaveGrid reconstruct(const ThetaParams& p, const GivenParams& given, const GridSpec& spec,
                     const LatticeTruncation& trunc) {
    if (spec.x.count < 1 || spec.t.count < 1) throw std::invalid_argument("grid axes need at least one point");
    ThetaSeries series(p, trunc);
    WaveGrid g{spec, Eigen::MatrixXd(spec.t.count, spec.x.count), Eigen::MatrixXd(spec.t.count, spec.x.count), p,
               given};
    for (int i = 0; i < spec.t.count; ++i) {
        for (int j = 0; j < spec.x.count; ++j) {
            auto [u, v] = fields_at(series, given, {spec.t.at(i), spec.z, spec.x.at(j)});
            g.values_u(i, j) = u;
            g.values_v(i, j) = v;
        }
    }
    return g;
}

double theta_min_on_grid(const ThetaParams& p, const GridSpec& spec, const LatticeTruncation& trunc) {
    ThetaSeries series(p, trunc);
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.t.count; ++i)
        for (int j = 0; j < spec.x.count; ++j) lo = std::min(lo, series.value({spec.t.at(i), spec.z, spec.x.at(j)}));
    return lo;
}

BilinearOracle::BilinearOracle(const BilinearSystem& system, const ThetaParams& p, double c1, double c2,
                               const LatticeTruncation& trunc) {
    build(system.f1, &system.f2, p, c1, c2, trunc);
}

BilinearOracle::BilinearOracle(const BilinearForm& form, const ThetaParams& p, double c,
                               const LatticeTruncation& trunc) {
    build(form, nullptr, p, c, 0.0, trunc);
}

void BilinearOracle::build(const BilinearForm& f1, const BilinearForm* f2, const ThetaParams& p, double c1, double c2,
                           const LatticeTruncation& trunc) {
    p.validate();
    const int n = p.n();
    const Eigen::MatrixXd tau = p.tau.dense();
    std::vector<int> lo(n, -trunc.m_max), hi(n, trunc.m_max);
    for_each_lattice_point(lo, hi, [&](const std::vector<int>& m) {
        double quad = 0.0;
        std::array<double, 4> d{0, 0, 0, 0};
        for (int j = 0; j < n; ++j) {
            d[0] += m[j] * p.omega[j];
            d[1] += m[j] * p.l[j];
            d[2] += m[j] * p.k[j];
            d[3] += m[j] * p.eta0[j];
            for (int i = 0; i < n; ++i) quad += m[i] * tau(i, j) * m[j];
        }
        const double w = std::exp(-0.5 * quad);
        if (w < trunc.tail_tol) return;
        dots_.push_back(d);
        weight_.push_back(w);
    });

    const auto size = static_cast<Eigen::Index>(weight_.size());
    has_second_ = f2 != nullptr;
    poly1_.resize(size, size);
    if (has_second_) poly2_.resize(size, size);
    for (Eigen::Index a = 0; a < size; ++a) {
        for (Eigen::Index b = 0; b < size; ++b) {
            const double arg[3] = {dots_[a][0] - dots_[b][0], dots_[a][1] - dots_[b][1], dots_[a][2] - dots_[b][2]};
            const double w = weight_[a] * weight_[b];
            poly1_(a, b) = f1.eval_imag(arg, c1) * w;
            if (has_second_) poly2_(a, b) = f2->eval_imag(arg, c2) * w;
        }
    }
}

OracleResidual BilinearOracle::at(const VarVector& point) const {
    const std::size_t size = weight_.size();
    std::vector<double> cs(size), sn(size);
    CompensatedSum theta;
    for (std::size_t a = 0; a < size; ++a) {
        const auto& d = dots_[a];
        const double ph = d[0] * point[0] + d[1] * point[1] + d[2] * point[2] + d[3];
        cs[a] = std::cos(ph);
        sn[a] = std::sin(ph);
        theta.add(weight_[a] * cs[a]);
    }
    CompensatedSum re1, im1, re2, im2;
    for (std::size_t a = 0; a < size; ++a) {
        for (std::size_t b = 0; b < size; ++b) {
            // e^{i(pa + pb)}
            const double c = cs[a] * cs[b] - sn[a] * sn[b];
            const double s = sn[a] * cs[b] + cs[a] * sn[b];
            const double p1 = poly1_(a, b);
            re1.add(p1 * c);
            im1.add(p1 * s);
            if (has_second_) {
                const double p2 = poly2_(a, b);
                re2.add(p2 * c);
                im2.add(p2 * s);
            }
        }
    }
    OracleResidual r;
    r.r1 = re1.value();
    r.r2 = re2.value();
    r.theta = theta.value();
    r.imag = std::max(std::abs(im1.value()), std::abs(im2.value()));
    return r;
}

OracleResidual bilinear_residual_oracle(const BilinearSystem& system, const ThetaParams& p, double c1, double c2,
                                        const VarVector& point, const LatticeTruncation& trunc) {
    return BilinearOracle(system, p, c1, c2, trunc).at(point);
}

OracleCheck check_oracle(const BilinearOracle& oracle, const OracleSampling& s) {
    std::mt19937_64 rng(s.rng_seed);
    std::uniform_real_distribution<double> ut(s.t_min, s.t_max), ux(s.x_min, s.x_max);
    OracleCheck out;
    for (int i = 0; i < s.points; ++i) {
        const double t = ut(rng);
        const VarVector pt{t, s.z, ux(rng)};
        const OracleResidual r = oracle.at(pt);
        const double th2 = r.theta * r.theta;
        const double norm = std::max(std::abs(r.r1), std::abs(r.r2)) / th2;
        const double imag = r.imag / th2;
        if (!(norm <= out.max_normalized)) {
            out.max_normalized = norm;
            out.worst_point = pt;
        }
        out.max_imag = std::max(out.max_imag, imag);
        ++out.points;
    }
    return out;
}

void export_grid(const WaveGrid& g, GridFormat format, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    const auto& s = g.spec;
    if (format == GridFormat::csv) {
        out << "x,t,u,v\n";
        for (int i = 0; i < s.t.count; ++i)
            for (int j = 0; j < s.x.count; ++j)
                out << format17(s.x.at(j)) << ',' << format17(s.t.at(i)) << ',' << format17(g.values_u(i, j)) << ','
                    << format17(g.values_v(i, j)) << '\n';
    } else {
        auto block = [&](const char* name, const Eigen::MatrixXd& m) {
            out << "# " << name << " rows=t cols=x\n";
            out << "t\\x";
            for (int j = 0; j < s.x.count; ++j) out << ',' << format17(s.x.at(j));
            out << '\n';
            for (int i = 0; i < s.t.count; ++i) {
                out << format17(s.t.at(i));
                for (int j = 0; j < s.x.count; ++j) out << ',' << format17(m(i, j));
                out << '\n';
            }
        };
        block("u", g.values_u);
        block("v", g.values_v);
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<GridRow> read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "x,t,u,v")
        throw std::runtime_error("'" + path.string() + "' is missing the x,t,u,v header");
    std::vector<GridRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        GridRow r{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.x, &r.t, &r.u, &r.v) != 4)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed grid row");
        rows.push_back(r);
    }
    return rows;
}

}  // namespace nperiodic
