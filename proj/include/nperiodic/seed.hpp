#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nperiodic/bilinear.hpp"
#include "nperiodic/residual.hpp"

namespace nperiodic {

enum class SeedMode { dispersion, explicit_x0, warm_start };

/// Initial-guess settings. `explicit_x0` and `warm_start` both take the
/// unknowns from `x0`; they differ only in how reports label the run.
struct SeedConfig {
    double c1_0 = 1.0;
    double c2_0 = 1.0;
    std::vector<double> tau_off_0;  // empty means all zero
    SeedMode mode = SeedMode::dispersion;
    std::optional<UnknownVector> x0;
    /// Which real dispersion root to take, counted in order of increasing |omega|.
    int root_index = 0;
    std::uint64_t rng_seed = 20170101;
};

struct DispersionRoot {
    double omega;
    double l;
};

struct DispersionSeed {
    std::vector<double> omega0;
    std::vector<double> l0;
    /// True for waves where no real root was found and (k^3, k) was substituted.
    std::vector<bool> fallback;
    /// All distinct real roots per wave, sorted by |omega|.
    std::vector<std::vector<DispersionRoot>> roots;

    bool any_fallback() const;
};

/// Real roots (omega, l) of F1(i omega, i l, i k, c1) = F2(i omega, i l, i k, c2) = 0,
/// found by damped Newton from (+-k^3, +-k) and then uniform draws in [-10, 10]^2.
std::vector<DispersionRoot> dispersion_roots(const BilinearSystem& system, double k, double c1_0, double c2_0,
                                             std::uint64_t rng_seed, int max_starts = 100);

DispersionSeed dispersion_seed(const BilinearSystem& system, const std::vector<double>& k, double c1_0,
                               double c2_0, int root_index = 0, std::uint64_t rng_seed = 20170101);

/// Initial unknown vector for a solve.
UnknownVector build_initial_guess(const BilinearSystem& system, const GivenParams& given, const SeedConfig& cfg,
                                  DispersionSeed* seed_info = nullptr);

}  // namespace nperiodic
