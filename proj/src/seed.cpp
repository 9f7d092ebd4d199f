#include "nperiodic/seed.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nperiodic {

namespace {

constexpr double kRootTol = 1e-12;
// Accepted when Newton stalls at the roundoff floor.
constexpr double kAcceptTol = 1e-10;

struct Eval2 {
    double g1, g2;
    double a, b, c, d;  // Jacobian [[a, b], [c, d]]
};

Eval2 eval2(const BilinearSystem& s, double k, double c1, double c2, double w, double l) {
    VarVector arg{w, l, k}, gr1, gr2;
    Eval2 e{};
    e.g1 = s.f1.eval_imag_with_grad(arg, c1, gr1);
    e.g2 = s.f2.eval_imag_with_grad(arg, c2, gr2);
    e.a = gr1[0];
    e.b = gr1[1];
    e.c = gr2[0];
    e.d = gr2[1];
    return e;
}

std::optional<DispersionRoot> newton2(const BilinearSystem& s, double k, double c1, double c2, double w, double l) {
    Eval2 e = eval2(s, k, c1, c2, w, l);
    double norm = std::hypot(e.g1, e.g2);
    for (int it = 0; it < 100; ++it) {
        if (norm < kRootTol) return DispersionRoot{w, l};
        const double det = e.a * e.d - e.b * e.c;
        if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
        const double dw = (e.d * e.g1 - e.b * e.g2) / det;
        const double dl = (-e.c * e.g1 + e.a * e.g2) / det;
        double step = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, step *= 0.5) {
            const double wn = w - step * dw, ln = l - step * dl;
            Eval2 en = eval2(s, k, c1, c2, wn, ln);
            const double nn = std::hypot(en.g1, en.g2);
            if (std::isfinite(nn) && nn < norm) {
                w = wn;
                l = ln;
                e = en;
                norm = nn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (norm < kAcceptTol) return DispersionRoot{w, l};
    return std::nullopt;
}

}  // namespace

bool DispersionSeed::any_fallback() const {
    return std::any_of(fallback.begin(), fallback.end(), [](bool b) { return b; });
}

std::vector<DispersionRoot> dispersion_roots(const BilinearSystem& system, double k, double c1_0, double c2_0,
                                             std::uint64_t rng_seed, int max_starts) {
    std::vector<std::pair<double, double>> starts;
    const double k3 = k * k * k;
    for (double sw : {1.0, -1.0})
        for (double sl : {1.0, -1.0}) starts.emplace_back(sw * k3, sl * k);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    while (static_cast<int>(starts.size()) < max_starts) {
        const double w = uni(rng);
        starts.emplace_back(w, uni(rng));
    }

    std::vector<DispersionRoot> roots;
    for (auto [w, l] : starts) {
        auto r = newton2(system, k, c1_0, c2_0, w, l);
        if (!r) continue;
        const bool dup = std::any_of(roots.begin(), roots.end(), [&](const DispersionRoot& q) {
            return std::abs(q.omega - r->omega) <= 1e-8 * (1 + std::abs(q.omega)) &&
                   std::abs(q.l - r->l) <= 1e-8 * (1 + std::abs(q.l));
        });
        if (!dup) roots.push_back(*r);
    }
    std::stable_sort(roots.begin(), roots.end(), [](const DispersionRoot& a, const DispersionRoot& b) {
        return std::abs(a.omega) < std::abs(b.omega);
    });
    return roots;
}

DispersionSeed dispersion_seed(const BilinearSystem& system, const std::vector<double>& k, double c1_0,
                               double c2_0, int root_index, std::uint64_t rng_seed) {
    DispersionSeed seed;
    for (std::size_t j = 0; j < k.size(); ++j) {
        auto roots = dispersion_roots(system, k[j], c1_0, c2_0, rng_seed + j);
        if (roots.empty()) {
            seed.omega0.push_back(k[j] * k[j] * k[j]);
            seed.l0.push_back(k[j]);
            seed.fallback.push_back(true);
        } else {
            const auto& r = roots[std::min<std::size_t>(std::max(root_index, 0), roots.size() - 1)];
            seed.omega0.push_back(r.omega);
            seed.l0.push_back(r.l);
            seed.fallback.push_back(false);
        }
        seed.roots.push_back(std::move(roots));
    }
    return seed;
}

UnknownVector build_initial_guess(const BilinearSystem& system, const GivenParams& given, const SeedConfig& cfg,
                                  DispersionSeed* seed_info) {
    const int n = given.n();
    if (cfg.mode != SeedMode::dispersion) {
        if (!cfg.x0) throw std::invalid_argument("seed mode requires explicit starting values");
        cfg.x0->check(n);
        return *cfg.x0;
    }
    DispersionSeed seed = dispersion_seed(system, given.k, cfg.c1_0, cfg.c2_0, cfg.root_index, cfg.rng_seed);
    UnknownVector x = UnknownVector::zeros(n);
    x.omega = seed.omega0;
    x.l = seed.l0;
    if (!cfg.tau_off_0.empty()) {
        if (static_cast<int>(cfg.tau_off_0.size()) != UnknownVector::off_diagonal_count(n))
            throw DimensionError("tau_off seed has wrong length");
        x.tau_off = cfg.tau_off_0;
    }
    x.c1 = cfg.c1_0;
    x.c2 = cfg.c2_0;
    if (seed_info) *seed_info = std::move(seed);
    return x;
}

}  // namespace nperiodic
