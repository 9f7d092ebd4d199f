#include "nperiodic/bilinear.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

namespace nperiodic {

namespace {

std::int64_t checked_pow10(int e) {
    if (e < 0 || e > 18) throw FormError("rational exponent out of range");
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= 10;
    return r;
}

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormError("invalid integer '" + std::string(s) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Decimal literal with optional exponent, parsed exactly.
Rational parse_decimal(std::string_view s) {
    int exp10 = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        std::string_view tail = s.substr(epos + 1);
        if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
        exp10 = static_cast<int>(parse_int(tail));
        s = s.substr(0, epos);
    }
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    int frac = 0;
    bool seen_point = false;
    for (char ch : s) {
        if (ch == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            if (seen_point) ++frac;
        } else {
            throw FormError("invalid number '" + std::string(s) + "'");
        }
    }
    if (digits.empty()) throw FormError("empty number");
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    if (digits.size() > 18) throw FormError("too many digits for an exact rational");
    std::int64_t num = parse_int(digits);
    int scale = exp10 - frac;
    if (neg) num = -num;
    if (scale >= 0) return Rational(num * checked_pow10(scale), 1);
    return Rational(num, checked_pow10(-scale));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw FormError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::parse(std::string_view text) {
    text = trim(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational a = parse_decimal(trim(text.substr(0, slash)));
        Rational b = parse_decimal(trim(text.substr(slash + 1)));
        if (b.num == 0) throw FormError("rational with zero denominator");
        return Rational(a.num * b.den, a.den * b.num);
    }
    return parse_decimal(text);
}

BilinearForm::BilinearForm(std::vector<Term> terms, bool has_constant)
    : terms_(std::move(terms)), has_constant_(has_constant) {
    std::set<Exponents> seen;
    for (const Term& t : terms_) {
        for (int e : t.exponents)
            if (e < 0) throw FormError("negative exponent in bilinear term");
        if (!std::isfinite(t.coeff.value())) throw FormError("non-finite coefficient");
        if (t.degree() % 2 != 0)
            throw FormError("odd total degree " + std::to_string(t.degree()) +
                            " in bilinear term; forms must be even");
        if (!seen.insert(t.exponents).second) throw FormError("duplicate exponent tuple");
        const double sign = (t.degree() / 2) % 2 == 0 ? 1.0 : -1.0;
        signed_.push_back({sign * t.coeff.value(), t.exponents});
        max_degree_ = std::max(max_degree_, t.degree());
    }
}

double BilinearForm::eval_real(std::span<const double> args, double c) const {
    if (args.size() != kNumVars)
        throw DimensionError("bilinear form expects " + std::to_string(kNumVars) + " arguments, got " +
                             std::to_string(args.size()));
    double sum = has_constant_ ? c : 0.0;
    for (const Term& t : terms_) {
        double m = t.coeff.value();
        for (std::size_t v = 0; v < kNumVars; ++v) m *= std::pow(args[v], t.exponents[v]);
        sum += m;
    }
    return sum;
}

double BilinearForm::eval_imag(std::span<const double> d, double c) const {
    if (d.size() != kNumVars)
        throw DimensionError("bilinear form expects " + std::to_string(kNumVars) + " arguments, got " +
                             std::to_string(d.size()));
    VarVector dv{d[0], d[1], d[2]};
    VarVector g;
    return eval_imag_with_grad(dv, c, g);
}

VarVector BilinearForm::grad_imag(const VarVector& d) const {
    VarVector g;
    eval_imag_with_grad(d, 0.0, g);
    return g;
}

double BilinearForm::eval_imag_with_grad(const VarVector& d, double c, VarVector& grad) const {
    // powers[v][p] = d[v]^p
    std::array<std::array<double, 16>, kNumVars> powers;
    const int top = std::min(max_degree_, 15);
    for (std::size_t v = 0; v < kNumVars; ++v) {
        powers[v][0] = 1.0;
        for (int p = 1; p <= top; ++p) powers[v][p] = powers[v][p - 1] * d[v];
    }
    auto pw = [&](std::size_t v, int p) { return p <= top ? powers[v][p] : std::pow(d[v], p); };

    double sum = has_constant_ ? c : 0.0;
    grad = {0.0, 0.0, 0.0};
    for (const SignedTerm& t : signed_) {
        const double a = pw(0, t.e[0]), b = pw(1, t.e[1]), x = pw(2, t.e[2]);
        sum += t.coeff * a * b * x;
        if (t.e[0] > 0) grad[0] += t.coeff * t.e[0] * pw(0, t.e[0] - 1) * b * x;
        if (t.e[1] > 0) grad[1] += t.coeff * t.e[1] * a * pw(1, t.e[1] - 1) * x;
        if (t.e[2] > 0) grad[2] += t.coeff * t.e[2] * a * b * pw(2, t.e[2] - 1);
    }
    return sum;
}

namespace {

Term term(Rational r, Exponents e, double scale = 1.0) { return Term{Coefficient{r, scale}, e}; }

}  // namespace

BilinearSystem builtin_system(std::string_view name, double v0) {
    if (name == "coupled-ramani") {
        // (D_x^6 - 5 D_x^3 D_t - 5 D_t^2 + 9 D_x D_z + c1) f.f = 0
        // (D_z D_t - D_z D_x^3 - 6 v0 D_x^2 + c2) f.f = 0
        BilinearForm f1({term(1, {0, 0, 6}), term(-5, {1, 0, 3}), term(-5, {2, 0, 0}), term(9, {0, 1, 1})}, true);
        std::vector<Term> t2{term(1, {1, 1, 0}), term(-1, {0, 1, 3})};
        if (v0 != 0.0) t2.push_back(term(-6, {0, 0, 2}, v0));
        return BilinearSystem{"coupled-ramani", std::move(f1), BilinearForm(std::move(t2), true)};
    }
    if (name == "hirota-satsuma") {
        // (D_x D_t - 1/4 D_x^4 - 3/4 D_z^2 + c1) f.f = 0
        // (D_z D_t + 1/2 D_z D_x^3 + c2) f.f = 0
        BilinearForm f1({term(1, {1, 0, 1}), term({-1, 4}, {0, 0, 4}), term({-3, 4}, {0, 2, 0})}, true);
        BilinearForm f2({term(1, {1, 1, 0}), term({1, 2}, {0, 1, 3})}, true);
        return BilinearSystem{"hirota-satsuma", std::move(f1), std::move(f2)};
    }
    throw std::invalid_argument("unknown equation '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() { return {"coupled-ramani", "hirota-satsuma"}; }

BilinearForm ramani_form() {
    return BilinearForm({term(1, {0, 0, 6}), term(-5, {1, 0, 3}), term(-5, {2, 0, 0})}, true);
}

}  // namespace nperiodic
