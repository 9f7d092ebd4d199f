#include <complex>
#include <random>

#include "doctest.h"
#include "nperiodic/bilinear.hpp"

using namespace nperiodic;

namespace {

// F(i d) + c evaluated in extended-precision complex arithmetic, term by term.
// `scale` receives |c| + sum of |term|, the natural size for relative errors
// when terms cancel.
double complex_reference(const BilinearForm& f, const VarVector& d, double c, double* imag = nullptr,
                         double* scale = nullptr) {
    std::complex<long double> acc = c;
    long double mag = std::abs(c);
    for (const Term& t : f.terms()) {
        std::complex<long double> p = static_cast<long double>(t.coeff.value());
        for (std::size_t v = 0; v < kNumVars; ++v)
            for (int e = 0; e < t.exponents[v]; ++e) p *= std::complex<long double>(0.0L, d[v]);
        acc += p;
        mag += std::abs(p);
    }
    if (imag) *imag = static_cast<double>(acc.imag());
    if (scale) *scale = static_cast<double>(mag);
    return static_cast<double>(acc.real());
}

}  // namespace

TEST_SUITE("bilinear") {
    TEST_CASE("rational parsing is exact") {
        CHECK(Rational::parse("3") == Rational(3));
        CHECK(Rational::parse("-1/4") == Rational(-1, 4));
        CHECK(Rational::parse("0.75") == Rational(3, 4));
        CHECK(Rational::parse("1.5e-2") == Rational(3, 200));
        CHECK(Rational(6, -4) == Rational(-3, 2));
        CHECK_THROWS(Rational::parse("1/0"));
        CHECK_THROWS(Rational::parse("abc"));
    }

    TEST_CASE("coupled Ramani real evaluation") {
        const auto sys = builtin_system("coupled-ramani", 0.0);
        const std::array<double, 3> zero{0, 0, 0}, x_only{0, 0, 1}, ones{1, 1, 1};
        CHECK(sys.f1.eval_real(zero, 1.0) == 1.0);
        CHECK(sys.f1.eval_real(x_only, 0.0) == 1.0);
        CHECK(sys.f2.eval_real(ones, 0.0) == 0.0);
    }

    TEST_CASE("imaginary evaluation of simple forms") {
        const BilinearForm x2({Term{{Rational(1), 1.0}, {0, 0, 2}}}, false);
        CHECK(x2.eval_imag(std::array<double, 3>{0, 0, 3.0}, 0.0) == doctest::Approx(-9.0));
        const BilinearForm c_only({}, true);
        CHECK(c_only.eval_imag(std::array<double, 3>{1.2, -3.4, 5.6}, 0.7) == 0.7);
    }

    TEST_CASE("registry") {
        const auto r0 = builtin_system("coupled-ramani", 0.0);
        const auto r1 = builtin_system("coupled-ramani", 1.0);
        auto has_x2 = [](const BilinearForm& f) {
            for (const auto& t : f.terms())
                if (t.exponents == Exponents{0, 0, 2}) return t.coeff.value();
            return 0.0;
        };
        CHECK(has_x2(r0.f2) == 0.0);
        CHECK(has_x2(r1.f2) == -6.0);
        CHECK(builtin_system("coupled-ramani", 0.3) == builtin_system("coupled-ramani", 0.3));
        CHECK(builtin_system("hirota-satsuma") == builtin_system("hirota-satsuma", 5.0));

        const auto hs = builtin_system("hirota-satsuma");
        CHECK(hs.f1.has_constant());
        CHECK(hs.f2.has_constant());
        // F1 = TX - X^4/4 - 3Z^2/4 + c at (1, 2, 1)
        CHECK(hs.f1.eval_real(std::array<double, 3>{1, 2, 1}, 0.5) == doctest::Approx(1 - 0.25 - 3.0 + 0.5));
        CHECK_THROWS_AS(builtin_system("no-such-equation"), std::invalid_argument);
    }

    TEST_CASE("form validation") {
        CHECK_THROWS_AS(BilinearForm({Term{{Rational(1), 1.0}, {0, 0, 3}}}, false), FormError);
        CHECK_THROWS_AS(BilinearForm({Term{{Rational(1), 1.0}, {1, 0, 1}}, Term{{Rational(2), 1.0}, {1, 0, 1}}}, false),
                        FormError);
        CHECK_THROWS_AS(BilinearForm({Term{{Rational(1), 1.0}, {-1, 0, 3}}}, false), FormError);
        CHECK_THROWS_AS(BilinearForm({Term{{Rational(1), std::nan("")}, {0, 0, 2}}}, false), FormError);
        const auto sys = builtin_system("coupled-ramani");
        CHECK_THROWS_AS(sys.f1.eval_real(std::vector<double>{1.0, 2.0}, 0.0), DimensionError);
    }

    TEST_CASE("evenness and complex consistency on random arguments") {
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        const std::vector<BilinearSystem> systems{builtin_system("coupled-ramani", 0.0),
                                                  builtin_system("coupled-ramani", 1.0),
                                                  builtin_system("hirota-satsuma")};
        double worst_rel = 0.0, worst_imag = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const VarVector d{u(rng), u(rng), u(rng)};
            const VarVector neg{-d[0], -d[1], -d[2]};
            const double c = u(rng);
            for (const auto& s : systems)
                for (const BilinearForm* f : {&s.f1, &s.f2}) {
                    CHECK(f->eval_real(d, c) == f->eval_real(neg, c));
                    double imag = 0.0, scale = 1.0;
                    const double ref = complex_reference(*f, d, c, &imag, &scale);
                    const double got = f->eval_imag(d, c);
                    worst_rel = std::max(worst_rel, std::abs(got - ref) / scale);
                    worst_imag = std::max(worst_imag, std::abs(imag) / scale);
                }
        }
        MESSAGE("max error relative to term magnitudes: " << worst_rel);
        CHECK(worst_rel < 1e-14);
        CHECK(worst_imag < 1e-14);
    }

    TEST_CASE("gradient matches central differences") {
        const auto sys = builtin_system("coupled-ramani", 1.0);
        const VarVector d{0.7, -1.3, 0.4};
        VarVector g{};
        const double v = sys.f1.eval_imag_with_grad(d, 0.25, g);
        CHECK(v == sys.f1.eval_imag(d, 0.25));
        for (std::size_t k = 0; k < kNumVars; ++k) {
            const double h = 1e-6;
            VarVector dp = d, dm = d;
            dp[k] += h;
            dm[k] -= h;
            const double fd = (sys.f1.eval_imag(dp, 0.0) - sys.f1.eval_imag(dm, 0.0)) / (2 * h);
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-7));
        }
        CHECK(sys.f1.max_degree() == 6);
        CHECK(ramani_form().max_degree() == 6);
    }
}
