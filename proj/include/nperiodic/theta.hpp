#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "nperiodic/bilinear.hpp"

namespace nperiodic {

/// Thrown when a tau matrix fails the positive-definiteness check.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(Eigen::MatrixXd tau);
    const Eigen::MatrixXd& matrix() const { return tau_; }

private:
    Eigen::MatrixXd tau_;
};

/// Symmetric n x n matrix stored as its packed upper triangle (row-major).
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(int n) : n_(n), packed_(static_cast<std::size_t>(n * (n + 1) / 2), 0.0) {}

    static SymmetricMatrix from_dense(const Eigen::MatrixXd& m);

    int size() const { return n_; }
    double operator()(int i, int j) const { return packed_[index(i, j)]; }
    void set(int i, int j, double v) { packed_[index(i, j)] = v; }

    Eigen::MatrixXd dense() const;
    bool all_finite() const;

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
    std::size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
    }

    int n_ = 0;
    std::vector<double> packed_;
};

/// Parameters of theta(eta; 0 | tau) with eta_j = omega_j t + l_j z + k_j x + eta0_j.
struct ThetaParams {
    std::vector<double> k;
    std::vector<double> omega;
    std::vector<double> l;
    std::vector<double> eta0;
    SymmetricMatrix tau;

    int n() const { return static_cast<int>(k.size()); }

    /// Checks lengths, finiteness and positive definiteness of tau.
    void validate() const;

    /// Phase vector eta at a point (t, z, x).
    std::vector<double> phases(const VarVector& point) const;
};

struct LatticeTruncation {
    int m_max = 6;
    double tail_tol = 1e-20;
};

inline constexpr double kDefaultTailTol = 1e-20;

/// Throws NotPositiveDefinite unless a Cholesky factorization succeeds.
void require_positive_definite(const Eigen::MatrixXd& tau);

/// Smallest M >= 1 with exp(-lambda_min/2 * r^2) < tail_tol, where
/// r = M - 1/2 for half-integer shifted lattices and r = M otherwise.
LatticeTruncation choose_truncation(const Eigen::MatrixXd& tau, double tail_tol = kDefaultTailTol,
                                    bool half_shift = true);

/// Multi-index of partial derivative orders over (t, z, x).
using DerivOrders = std::array<int, kNumVars>;

/// Cosine form of the truncated theta series over the box [-M, M]^N.
/// Lattice weights and per-point dot products are precomputed so repeated
/// evaluation over a grid touches only the trigonometric part.
class ThetaSeries {
public:
    ThetaSeries(const ThetaParams& p, const LatticeTruncation& trunc);

    double value(const VarVector& point) const;
    double partial(const VarVector& point, const DerivOrders& orders) const;

    /// theta and the partials needed by the u, v field transformation.
    struct Jet {
        double f, fx, fz, fxx, fxz;
    };
    Jet jet(const VarVector& point) const;

    std::size_t lattice_size() const { return weight_.size(); }

private:
    double phase(std::size_t idx, const VarVector& point) const;

    // Per lattice point: m.omega, m.l, m.k, m.eta0 and exp(-1/2 m^T tau m).
    std::vector<std::array<double, 4>> dots_;
    std::vector<double> weight_;
};

double theta_eval(const ThetaParams& p, const VarVector& point, const LatticeTruncation& trunc);

/// Throws std::invalid_argument if the total order exceeds 4.
double theta_partial(const ThetaParams& p, const VarVector& point, const DerivOrders& orders,
                     const LatticeTruncation& trunc);

/// Enumerates the integer box [lo_j, hi_j] in lexicographic order (last index fastest).
template <class Fn>
void for_each_lattice_point(const std::vector<int>& lo, const std::vector<int>& hi, Fn&& fn) {
    const std::size_t n = lo.size();
    std::vector<int> m(lo);
    if (n == 0) {
        fn(m);
        return;
    }
    for (;;) {
        fn(m);
        std::size_t j = n;
        for (;;) {
            if (j == 0) return;
            --j;
            if (m[j] < hi[j]) {
                ++m[j];
                break;
            }
            m[j] = lo[j];
        }
    }
}

}  // namespace nperiodic
