#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nperiodic/theta.hpp"
#include "reference_rows.hpp"

using namespace nperiodic;

namespace {

ThetaParams random_params(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ThetaParams p;
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    Eigen::MatrixXd tau = a * a.transpose() + 3.0 * Eigen::MatrixXd::Identity(n, n);
    p.tau = SymmetricMatrix::from_dense(tau);
    for (int j = 0; j < n; ++j) {
        p.k.push_back(2.0 * u(rng));
        p.omega.push_back(2.0 * u(rng));
        p.l.push_back(2.0 * u(rng));
        p.eta0.push_back(3.0 * u(rng));
    }
    return p;
}

// Sum of exp(i m.eta - m^T tau m / 2) over the full box.
std::complex<double> complex_theta(const ThetaParams& p, const VarVector& point, int m_max) {
    const int n = p.n();
    const auto eta = p.phases(point);
    const Eigen::MatrixXd tau = p.tau.dense();
    std::complex<double> acc = 0.0;
    for_each_lattice_point(std::vector<int>(n, -m_max), std::vector<int>(n, m_max), [&](const std::vector<int>& m) {
        double dot = 0.0, quad = 0.0;
        for (int i = 0; i < n; ++i) {
            dot += m[i] * eta[i];
            for (int j = 0; j < n; ++j) quad += m[i] * tau(i, j) * m[j];
        }
        acc += std::polar(std::exp(-0.5 * quad), dot);
    });
    return acc;
}

ThetaParams table1_row1() {
    const auto& r = testdata::row("t1-r1");
    ThetaParams p;
    p.k = r.given().k;
    p.omega = r.omega;
    p.l = r.l;
    p.eta0 = {0.0};
    p.tau = SymmetricMatrix::from_dense(Eigen::MatrixXd::Constant(1, 1, r.given().tau_diag[0]));
    return p;
}

}  // namespace

TEST_SUITE("theta") {
    TEST_CASE("truncation bound") {
        // (M - 1/2)^2 > 2 ln(1e20) / 2.8903 = 31.87 gives M = 7.
        const Eigen::MatrixXd t1 = Eigen::MatrixXd::Constant(1, 1, 0.46 * testdata::kTwoPi);
        CHECK(choose_truncation(t1, 1e-20, true).m_max == 7);
        CHECK(choose_truncation(t1, 1e-20, false).m_max == 6);
        const Eigen::MatrixXd big = Eigen::MatrixXd::Constant(1, 1, 100.0);
        CHECK(choose_truncation(big, 1e-20, true).m_max <= 2);
        CHECK(choose_truncation(big, 1e-20, true).m_max >= 1);
        CHECK_THROWS_AS(choose_truncation(t1, 0.0), std::invalid_argument);
    }

    TEST_CASE("non positive definite tau is rejected") {
        Eigen::MatrixXd tau(2, 2);
        tau << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(require_positive_definite(tau), NotPositiveDefinite);
        CHECK_THROWS_AS(choose_truncation(tau), NotPositiveDefinite);
        ThetaParams p;
        p.k = {1, 1};
        p.omega = {0, 0};
        p.l = {0, 0};
        p.eta0 = {0, 0};
        p.tau = SymmetricMatrix::from_dense(tau);
        CHECK_THROWS_AS(p.validate(), NotPositiveDefinite);
        try {
            require_positive_definite(tau);
        } catch (const NotPositiveDefinite& e) {
            CHECK(e.matrix() == tau);
        }
    }

    TEST_CASE("symmetric matrix storage") {
        Eigen::MatrixXd m(3, 3);
        m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
        const auto s = SymmetricMatrix::from_dense(m);
        CHECK(s.dense() == m);
        CHECK(s(2, 0) == 3);
        CHECK_THROWS_AS(SymmetricMatrix::from_dense(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
    }

    TEST_CASE("value at zero phase exceeds one") {
        auto p = table1_row1();
        const LatticeTruncation tr{7, 1e-20};
        const double v = theta_eval(p, {0, 0, 0}, tr);
        const double tau = p.tau(0, 0);
        double expect = 1.0;
        for (int m = 1; m <= 7; ++m) expect += 2.0 * std::exp(-0.5 * tau * m * m);
        CHECK(v > 1.0);
        CHECK(v == doctest::Approx(expect).epsilon(1e-15));
    }

    TEST_CASE("alternating series at eta = pi") {
        auto p = table1_row1();
        p.eta0 = {std::numbers::pi};
        const LatticeTruncation tr{7, 1e-20};
        const double v = theta_eval(p, {0, 0, 0}, tr);
        const auto ref = complex_theta(p, {0, 0, 0}, 7);
        CHECK(std::abs(v - ref.real()) < 1e-15);
        CHECK(std::abs(ref.imag()) < 1e-15);
        const double tau = p.tau(0, 0);
        double alternating = 1.0;
        for (int m = 1; m <= 7; ++m) alternating += 2.0 * (m % 2 ? -1.0 : 1.0) * std::exp(-0.5 * tau * m * m);
        CHECK(v == doctest::Approx(alternating).epsilon(1e-15));
    }

    TEST_CASE("realness against the complex series") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-20.0, 20.0);
        double worst_diff = 0.0, worst_imag = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 1 + trial % 3;
            const auto p = random_params(rng, n);
            const VarVector pt{u(rng), u(rng), u(rng)};
            const LatticeTruncation tr{5, 1e-20};
            const auto ref = complex_theta(p, pt, 5);
            worst_diff = std::max(worst_diff, std::abs(theta_eval(p, pt, tr) - ref.real()) / std::abs(ref.real()));
            worst_imag = std::max(worst_imag, std::abs(ref.imag()));
        }
        CHECK(worst_diff < 1e-13);
        CHECK(worst_imag < 1e-13);
    }

    TEST_CASE("evenness and 2pi periodicity") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 1 + trial % 3;
            const auto p = random_params(rng, n);
            const VarVector pt{u(rng), u(rng), u(rng)};
            const LatticeTruncation tr{6, 1e-20};
            const double v = theta_eval(p, pt, tr);

            ThetaParams neg = p;
            for (int j = 0; j < n; ++j) {
                neg.k[j] = -p.k[j];
                neg.omega[j] = -p.omega[j];
                neg.l[j] = -p.l[j];
                neg.eta0[j] = -p.eta0[j];
            }
            CHECK(std::abs(theta_eval(neg, pt, tr) - v) <= 1e-15 * std::abs(v));

            for (int j = 0; j < n; ++j) {
                ThetaParams shifted = p;
                shifted.eta0[j] += testdata::kTwoPi;
                CHECK(std::abs(theta_eval(shifted, pt, tr) - v) <= 1e-15 * std::abs(v));
            }
        }
    }

    TEST_CASE("truncation stability") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 1 + trial % 3;
            const auto p = random_params(rng, n);
            const double tail = 1e-20;
            auto tr = choose_truncation(p.tau.dense(), tail, false);
            const VarVector pt{u(rng), u(rng), u(rng)};
            const double a = theta_eval(p, pt, tr);
            tr.m_max += 2;
            const double b = theta_eval(p, pt, tr);
            CHECK(std::abs(a - b) < 10 * tail);
        }
    }

    TEST_CASE("partials") {
        const auto p = table1_row1();
        const LatticeTruncation tr{7, 1e-20};
        const VarVector pt{1.3, 0.0, 2.7};
        CHECK(theta_partial(p, pt, {0, 0, 0}, tr) == theta_eval(p, pt, tr));
        // eta = 0 at the origin with eta0 = 0, and theta is even in eta
        CHECK(theta_partial(p, {0, 0, 0}, {0, 0, 1}, tr) == 0.0);
        CHECK_THROWS_AS(theta_partial(p, pt, {1, 2, 2}, tr), std::invalid_argument);

        const double h = 1e-4;
        auto at = [&](double dx) { return theta_eval(p, {pt[0], pt[1], pt[2] + dx}, tr); };
        const double fd = (at(h) - 2 * at(0) + at(-h)) / (h * h);
        const double an = theta_partial(p, pt, {0, 0, 2}, tr);
        CHECK(std::abs(fd - an) / std::abs(an) < 1e-6);

        std::mt19937_64 rng(3);
        const auto q = random_params(rng, 2);
        const ThetaSeries s(q, tr);
        const auto jet = s.jet(pt);
        CHECK(jet.f == doctest::Approx(s.value(pt)).epsilon(1e-14));
        CHECK(jet.fx == doctest::Approx(s.partial(pt, {0, 0, 1})).epsilon(1e-14));
        CHECK(jet.fz == doctest::Approx(s.partial(pt, {0, 1, 0})).epsilon(1e-14));
        CHECK(jet.fxx == doctest::Approx(s.partial(pt, {0, 0, 2})).epsilon(1e-14));
        CHECK(jet.fxz == doctest::Approx(s.partial(pt, {0, 1, 1})).epsilon(1e-14));
        // mixed t-derivative against central differences of the x-derivative
        auto dx_at = [&](double dt) { return s.partial({pt[0] + dt, pt[1], pt[2]}, {0, 0, 1}); };
        const double fd_tx = (dx_at(h) - dx_at(-h)) / (2 * h);
        CHECK(s.partial(pt, {1, 0, 1}) == doctest::Approx(fd_tx).epsilon(1e-6));
    }

    TEST_CASE("lattice enumeration order") {
        std::vector<std::vector<int>> seen;
        for_each_lattice_point({0, -1}, {1, 1}, [&](const std::vector<int>& m) { seen.push_back(m); });
        REQUIRE(seen.size() == 6);
        CHECK(seen.front() == std::vector<int>{0, -1});
        CHECK(seen[1] == std::vector<int>{0, 0});
        CHECK(seen.back() == std::vector<int>{1, 1});
    }
}
