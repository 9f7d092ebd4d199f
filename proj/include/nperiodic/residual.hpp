#pragma once

#include <Eigen/Dense>

#include <vector>

#include "nperiodic/bilinear.hpp"
#include "nperiodic/theta.hpp"

namespace nperiodic {

/// Free parameters of the residual system. Flattened order is
/// (omega_1..omega_N, l_1..l_N, tau_12, tau_13, ..., tau_{N-1,N}, c1, c2).
struct UnknownVector {
    std::vector<double> omega;
    std::vector<double> l;
    std::vector<double> tau_off;
    double c1 = 0.0;
    double c2 = 0.0;

    int n() const { return static_cast<int>(omega.size()); }

    static int dimension(int n) { return n + 2 + n * (n + 1) / 2; }
    static int off_diagonal_count(int n) { return n * (n - 1) / 2; }

    static UnknownVector zeros(int n);
    static UnknownVector from_flat(int n, const Eigen::VectorXd& flat);
    Eigen::VectorXd flat() const;

    /// Throws DimensionError on inconsistent lengths.
    void check(int n) const;

    friend bool operator==(const UnknownVector&, const UnknownVector&) = default;
};

/// Parameters held fixed while solving.
struct GivenParams {
    std::vector<double> k;
    std::vector<double> tau_diag;
    double v0 = 0.0;
    double u0 = 0.0;

    int n() const { return static_cast<int>(k.size()); }
    void validate() const;
};

/// Full symmetric tau from the given diagonal and unknown off-diagonal entries.
Eigen::MatrixXd assemble_tau(const GivenParams& given, const UnknownVector& x);

/// Theta parameters of a solution, with the supplied phase offsets (zero by default).
ThetaParams make_theta_params(const GivenParams& given, const UnknownVector& x,
                              std::vector<double> eta0 = {});

/// The 2^{N+1} lattice-sum conditions
///   sum_m F_i(2i d.omega, 2i d.l, 2i d.k, c_i) exp(-d^T tau d) = 0,  d = m - mu/2,
/// F1 block first, then F2, with mu in binary counting order (mu_1 most significant).
class ResidualSystem {
public:
    ResidualSystem(BilinearSystem system, GivenParams given, LatticeTruncation trunc);

    int n() const { return given_.n(); }
    int num_conditions() const { return 2 * static_cast<int>(mu_list_.size()); }
    int num_unknowns() const { return UnknownVector::dimension(n()); }

    const BilinearSystem& system() const { return system_; }
    const GivenParams& given() const { return given_; }
    const LatticeTruncation& truncation() const { return trunc_; }
    const std::vector<std::vector<int>>& mu_list() const { return mu_list_; }

    /// Throws NotPositiveDefinite if the assembled tau is not PD.
    Eigen::VectorXd eval_H(const UnknownVector& x) const;
    Eigen::MatrixXd eval_J(const UnknownVector& x) const;

    /// H and J in one pass over the lattice.
    void evaluate(const UnknownVector& x, Eigen::VectorXd& h, Eigen::MatrixXd* jac) const;

private:
    BilinearSystem system_;
    GivenParams given_;
    LatticeTruncation trunc_;
    std::vector<std::vector<int>> mu_list_;
    // For each mu: the shifted lattice vectors d = m - mu/2, flattened N at a time.
    std::vector<std::vector<double>> shifted_;
};

}  // namespace nperiodic
