#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "nperiodic/bilinear.hpp"
#include "nperiodic/residual.hpp"
#include "nperiodic/theta.hpp"

namespace nperiodic {

struct Axis {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    double at(int i) const { return count == 1 ? min : min + (max - min) * i / (count - 1); }
};

struct GridSpec {
    Axis x{0.0, 20.0, 201};
    Axis t{0.0, 50.0, 201};
    double z = 0.0;
};

/// Sampled fields; values_u(i, j) is u at t = t.at(i), x = x.at(j).
struct WaveGrid {
    GridSpec spec;
    Eigen::MatrixXd values_u;
    Eigen::MatrixXd values_v;
    ThetaParams params;
    GivenParams given;
};

class NonPositiveTheta : public std::runtime_error {
public:
    NonPositiveTheta(const VarVector& point, double value);
    const VarVector& point() const { return point_; }

private:
    VarVector point_;
};

/// u = u0 + (ln theta)_xx, v = v0 + (ln theta)_xz on the grid.
WaveGrid reconstruct(const ThetaParams& p, const GivenParams& given, const GridSpec& spec,
                     const LatticeTruncation& trunc);

/// u and v at a single point.
std::pair<double, double> fields_at(const ThetaSeries& series, const GivenParams& given, const VarVector& point);

/// Smallest theta value over the grid (positivity diagnostic).
double theta_min_on_grid(const ThetaParams& p, const GridSpec& spec, const LatticeTruncation& trunc);

struct OracleResidual {
    double r1 = 0.0;
    double r2 = 0.0;
    double theta = 0.0;
    /// Largest imaginary part seen; vanishes up to roundoff.
    double imag = 0.0;
};

/// Evaluates F(D_t, D_z, D_x) theta.theta directly as the double lattice sum
///   sum_{m,n} F(i (m-n).omega, i (m-n).l, i (m-n).k, c) exp(i (m+n).eta - (m^T tau m + n^T tau n)/2),
/// independently of the residual-system lattice conditions. Lattice points whose
/// Gaussian weight falls below the truncation tolerance are skipped.
class BilinearOracle {
public:
    BilinearOracle(const BilinearSystem& system, const ThetaParams& p, double c1, double c2,
                   const LatticeTruncation& trunc);
    /// Single-form variant; r2 is reported as zero.
    BilinearOracle(const BilinearForm& form, const ThetaParams& p, double c, const LatticeTruncation& trunc);

    OracleResidual at(const VarVector& point) const;
    std::size_t lattice_size() const { return weight_.size(); }

private:
    void build(const BilinearForm& f1, const BilinearForm* f2, const ThetaParams& p, double c1, double c2,
               const LatticeTruncation& trunc);

    std::vector<std::array<double, 4>> dots_;  // m.omega, m.l, m.k, m.eta0
    std::vector<double> weight_;
    Eigen::MatrixXd poly1_, poly2_;  // F values per lattice pair
    bool has_second_ = false;
};

OracleResidual bilinear_residual_oracle(const BilinearSystem& system, const ThetaParams& p, double c1, double c2,
                                        const VarVector& point, const LatticeTruncation& trunc);

struct OracleCheck {
    double max_normalized = 0.0;  // max(|r1|, |r2|) / theta^2
    double max_imag = 0.0;
    int points = 0;
    VarVector worst_point{0, 0, 0};
};

struct OracleSampling {
    int points = 100;
    double t_min = 0.0, t_max = 10.0;
    double x_min = 0.0, x_max = 50.0;
    double z = 0.0;
    std::uint64_t rng_seed = 7;
};

OracleCheck check_oracle(const BilinearOracle& oracle, const OracleSampling& sampling = {});

inline constexpr double kOracleTol = 1e-10;

enum class GridFormat { csv, matrix };

/// Writes the grid with 17 significant digits. `csv` is one row per sample
/// with header "x,t,u,v"; `matrix` writes u then v as t-by-x blocks.
void export_grid(const WaveGrid& g, GridFormat format, const std::filesystem::path& path);

struct GridRow {
    double x, t, u, v;
};

std::vector<GridRow> read_grid_csv(const std::filesystem::path& path);

}  // namespace nperiodic
