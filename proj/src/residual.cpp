#include "nperiodic/residual.hpp"

#include <cmath>
#include <string>

namespace nperiodic {

UnknownVector UnknownVector::zeros(int n) {
    UnknownVector x;
    x.omega.assign(n, 0.0);
    x.l.assign(n, 0.0);
    x.tau_off.assign(off_diagonal_count(n), 0.0);
    return x;
}

UnknownVector UnknownVector::from_flat(int n, const Eigen::VectorXd& flat) {
    if (flat.size() != dimension(n))
        throw DimensionError("unknown vector of length " + std::to_string(flat.size()) + ", expected " +
                             std::to_string(dimension(n)));
    UnknownVector x;
    int i = 0;
    for (int j = 0; j < n; ++j) x.omega.push_back(flat[i++]);
    for (int j = 0; j < n; ++j) x.l.push_back(flat[i++]);
    for (int j = 0; j < off_diagonal_count(n); ++j) x.tau_off.push_back(flat[i++]);
    x.c1 = flat[i++];
    x.c2 = flat[i++];
    return x;
}

Eigen::VectorXd UnknownVector::flat() const {
    Eigen::VectorXd v(dimension(n()));
    int i = 0;
    for (double w : omega) v[i++] = w;
    for (double w : l) v[i++] = w;
    for (double w : tau_off) v[i++] = w;
    v[i++] = c1;
    v[i++] = c2;
    return v;
}

void UnknownVector::check(int n) const {
    if (static_cast<int>(omega.size()) != n || static_cast<int>(l.size()) != n ||
        static_cast<int>(tau_off.size()) != off_diagonal_count(n))
        throw DimensionError("unknown vector does not match N = " + std::to_string(n));
}

void GivenParams::validate() const {
    if (k.empty()) throw DimensionError("at least one wave is required");
    if (tau_diag.size() != k.size()) throw DimensionError("k and tau_diag must have equal length");
    for (double t : tau_diag)
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("tau_diag entries must be positive");
    for (double v : k)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite wave number");
}

Eigen::MatrixXd assemble_tau(const GivenParams& given, const UnknownVector& x) {
    const int n = given.n();
    x.check(n);
    Eigen::MatrixXd tau(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i) {
        tau(i, i) = given.tau_diag[i];
        for (int j = i + 1; j < n; ++j) {
            tau(i, j) = tau(j, i) = x.tau_off[idx++];
        }
    }
    return tau;
}

ThetaParams make_theta_params(const GivenParams& given, const UnknownVector& x, std::vector<double> eta0) {
    if (eta0.empty()) eta0.assign(given.n(), 0.0);
    return ThetaParams{given.k, x.omega, x.l, std::move(eta0),
                       SymmetricMatrix::from_dense(assemble_tau(given, x))};
}

ResidualSystem::ResidualSystem(BilinearSystem system, GivenParams given, LatticeTruncation trunc)
    : system_(std::move(system)), given_(std::move(given)), trunc_(trunc) {
    given_.validate();
    if (trunc_.m_max < 1) throw std::invalid_argument("truncation bound must be at least 1");
    const int n = given_.n();
    if (n > 6) throw std::invalid_argument("at most 6 waves are supported");

    for (int code = 0; code < (1 << n); ++code) {
        std::vector<int> mu(n);
        for (int j = 0; j < n; ++j) mu[j] = (code >> (n - 1 - j)) & 1;
        mu_list_.push_back(mu);

        // mu_j = 1 shifts the box to [-M, M+1] so d_j stays symmetric about 0
        std::vector<int> lo(n, -trunc_.m_max), hi(n);
        for (int j = 0; j < n; ++j) hi[j] = trunc_.m_max + mu[j];
        std::vector<double> ds;
        for_each_lattice_point(lo, hi, [&](const std::vector<int>& m) {
            for (int j = 0; j < n; ++j) ds.push_back(m[j] - 0.5 * mu[j]);
        });
        shifted_.push_back(std::move(ds));
    }
    if (num_conditions() != (2 << n)) throw std::logic_error("condition count mismatch");
}

Eigen::VectorXd ResidualSystem::eval_H(const UnknownVector& x) const {
    Eigen::VectorXd h;
    evaluate(x, h, nullptr);
    return h;
}

Eigen::MatrixXd ResidualSystem::eval_J(const UnknownVector& x) const {
    Eigen::VectorXd h;
    Eigen::MatrixXd j;
    evaluate(x, h, &j);
    return j;
}

void ResidualSystem::evaluate(const UnknownVector& x, Eigen::VectorXd& h, Eigen::MatrixXd* jac) const {
    const int n = given_.n();
    const Eigen::MatrixXd tau = assemble_tau(given_, x);
    require_positive_definite(tau);

    const int blocks = static_cast<int>(mu_list_.size());
    const int col_l = n, col_tau = 2 * n, col_c1 = 2 * n + UnknownVector::off_diagonal_count(n);
    const int col_c2 = col_c1 + 1;

    h.setZero(num_conditions());
    if (jac) jac->setZero(num_conditions(), num_unknowns());

    for (int q = 0; q < blocks; ++q) {
        const std::vector<double>& ds = shifted_[q];
        const int r1 = q, r2 = blocks + q;
        for (std::size_t base = 0; base < ds.size(); base += n) {
            const double* d = ds.data() + base;
            VarVector arg{0.0, 0.0, 0.0};
            double quad = 0.0;
            for (int j = 0; j < n; ++j) {
                arg[0] += d[j] * x.omega[j];
                arg[1] += d[j] * x.l[j];
                arg[2] += d[j] * given_.k[j];
                double row = 0.0;
                for (int i = 0; i < n; ++i) row += tau(j, i) * d[i];
                quad += d[j] * row;
            }
            for (double& a : arg) a *= 2.0;
            const double w = std::exp(-quad);

            VarVector g1, g2;
            const double v1 = system_.f1.eval_imag_with_grad(arg, x.c1, g1);
            const double v2 = system_.f2.eval_imag_with_grad(arg, x.c2, g2);
            h[r1] += v1 * w;
            h[r2] += v2 * w;
            if (!jac) continue;

            auto& J = *jac;
            for (int j = 0; j < n; ++j) {
                const double s = 2.0 * d[j] * w;
                J(r1, j) += g1[0] * s;
                J(r2, j) += g2[0] * s;
                J(r1, col_l + j) += g1[1] * s;
                J(r2, col_l + j) += g2[1] * s;
            }
            int idx = col_tau;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++idx) {
                    // tau_ij appears at (i,j) and (j,i) of the quadratic form
                    const double s = -2.0 * d[i] * d[j] * w;
                    J(r1, idx) += v1 * s;
                    J(r2, idx) += v2 * s;
                }
            }
            if (system_.f1.has_constant()) J(r1, col_c1) += w;
            if (system_.f2.has_constant()) J(r2, col_c2) += w;
        }
    }
}

}  // namespace nperiodic
