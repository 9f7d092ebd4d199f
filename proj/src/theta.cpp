#include "nperiodic/theta.hpp"

#include <cmath>
#include <sstream>

namespace nperiodic {

namespace {

std::string describe(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os.precision(17);
    os << "tau is not positive definite:\n" << m;
    return os.str();
}

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(Eigen::MatrixXd tau)
    : std::runtime_error(describe(tau)), tau_(std::move(tau)) {}

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("tau must be square");
    SymmetricMatrix s(static_cast<int>(m.rows()));
    for (int i = 0; i < s.n_; ++i)
        for (int j = i; j < s.n_; ++j) s.set(i, j, m(i, j));
    return s;
}

Eigen::MatrixXd SymmetricMatrix::dense() const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

bool SymmetricMatrix::all_finite() const {
    for (double v : packed_)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_positive_definite(const Eigen::MatrixXd& tau) {
    if (!tau.allFinite()) throw NotPositiveDefinite(tau);
    Eigen::LLT<Eigen::MatrixXd> llt(tau);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite(tau);
}

void ThetaParams::validate() const {
    const std::size_t n = k.size();
    if (omega.size() != n || l.size() != n || eta0.size() != n || tau.size() != static_cast<int>(n))
        throw DimensionError("theta parameter vectors must all have length N");
    for (const auto* v : {&k, &omega, &l, &eta0})
        for (double x : *v)
            if (!std::isfinite(x)) throw std::invalid_argument("non-finite theta parameter");
    require_positive_definite(tau.dense());
}

std::vector<double> ThetaParams::phases(const VarVector& point) const {
    std::vector<double> eta(k.size());
    for (std::size_t j = 0; j < k.size(); ++j)
        eta[j] = omega[j] * point[0] + l[j] * point[1] + k[j] * point[2] + eta0[j];
    return eta;
}

LatticeTruncation choose_truncation(const Eigen::MatrixXd& tau, double tail_tol, bool half_shift) {
    require_positive_definite(tau);
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tau, Eigen::EigenvaluesOnly);
    const double lambda_min = es.eigenvalues().minCoeff();
    const double shift = half_shift ? 0.5 : 0.0;
    int m = 1;
    while (std::exp(-0.5 * lambda_min * (m - shift) * (m - shift)) >= tail_tol) ++m;
    return LatticeTruncation{m, tail_tol};
}

ThetaSeries::ThetaSeries(const ThetaParams& p, const LatticeTruncation& trunc) {
    p.validate();
    const int n = p.n();
    const Eigen::MatrixXd tau = p.tau.dense();
    std::vector<int> lo(n, -trunc.m_max), hi(n, trunc.m_max);
    for_each_lattice_point(lo, hi, [&](const std::vector<int>& m) {
        std::array<double, 4> d{0, 0, 0, 0};
        double quad = 0.0;
        for (int j = 0; j < n; ++j) {
            d[0] += m[j] * p.omega[j];
            d[1] += m[j] * p.l[j];
            d[2] += m[j] * p.k[j];
            d[3] += m[j] * p.eta0[j];
            for (int i = 0; i < n; ++i) quad += m[i] * tau(i, j) * m[j];
        }
        dots_.push_back(d);
        weight_.push_back(std::exp(-0.5 * quad));
    });
}

double ThetaSeries::phase(std::size_t idx, const VarVector& point) const {
    const auto& d = dots_[idx];
    return d[0] * point[0] + d[1] * point[1] + d[2] * point[2] + d[3];
}

double ThetaSeries::value(const VarVector& point) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weight_.size(); ++i) sum += weight_[i] * std::cos(phase(i, point));
    return sum;
}

double ThetaSeries::partial(const VarVector& point, const DerivOrders& orders) const {
    for (int o : orders)
        if (o < 0) throw std::invalid_argument("negative derivative order");
    const int total = orders[0] + orders[1] + orders[2];
    if (total > 4) throw std::invalid_argument("derivative order above 4 is not supported");
    double sum = 0.0;
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        double factor = weight_[i];
        for (std::size_t v = 0; v < kNumVars; ++v)
            for (int r = 0; r < orders[v]; ++r) factor *= dots_[i][v];
        if (factor == 0.0) continue;
        // d^n/dphi^n cos(phi) = cos(phi + n pi/2)
        const double ph = phase(i, point);
        double trig;
        switch (total % 4) {
            case 0: trig = std::cos(ph); break;
            case 1: trig = -std::sin(ph); break;
            case 2: trig = -std::cos(ph); break;
            default: trig = std::sin(ph); break;
        }
        sum += factor * trig;
    }
    return sum;
}

ThetaSeries::Jet ThetaSeries::jet(const VarVector& point) const {
    Jet j{0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        const double w = weight_[i];
        const double ph = phase(i, point);
        const double c = std::cos(ph), s = std::sin(ph);
        const double mz = dots_[i][1], mx = dots_[i][2];
        j.f += w * c;
        j.fx -= w * mx * s;
        j.fz -= w * mz * s;
        j.fxx -= w * mx * mx * c;
        j.fxz -= w * mx * mz * c;
    }
    return j;
}

double theta_eval(const ThetaParams& p, const VarVector& point, const LatticeTruncation& trunc) {
    return ThetaSeries(p, trunc).value(point);
}

double theta_partial(const ThetaParams& p, const VarVector& point, const DerivOrders& orders,
                     const LatticeTruncation& trunc) {
    return ThetaSeries(p, trunc).partial(point, orders);
}

}  // namespace nperiodic
