#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nperiodic {

/// Number of independent variables, in canonical order (t, z, x).
inline constexpr std::size_t kNumVars = 3;

using Exponents = std::array<int, kNumVars>;
using VarVector = std::array<double, kNumVars>;

class DimensionError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class FormError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exact rational number, reduced, with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    /// Parses "3", "-1/4", "0.75" or "1.5e-2" exactly.
    static Rational parse(std::string_view text);

    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Coefficient of a D-monomial: an exact rational times a real scale.
/// The scale carries real-valued model parameters such as v0.
struct Coefficient {
    Rational ratio{1};
    double scale = 1.0;

    double value() const { return scale * ratio.value(); }
    friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

struct Term {
    Coefficient coeff;
    Exponents exponents{};

    int degree() const { return exponents[0] + exponents[1] + exponents[2]; }
    friend bool operator==(const Term&, const Term&) = default;
};

/// Even polynomial in the Hirota D-operator symbols (D_t, D_z, D_x) plus an
/// optional additive integral constant. Immutable once constructed.
class BilinearForm {
public:
    BilinearForm() = default;

    /// Throws FormError on odd total degree, non-finite coefficient,
    /// negative exponent or duplicate exponent tuple.
    BilinearForm(std::vector<Term> terms, bool has_constant);

    const std::vector<Term>& terms() const { return terms_; }
    bool has_constant() const { return has_constant_; }
    int max_degree() const { return max_degree_; }

    /// F(args) + c.
    double eval_real(std::span<const double> args, double c) const;

    /// F(i*d) + c, which is real for an even form.
    double eval_imag(std::span<const double> d, double c) const;

    /// Gradient of F(i*d) with respect to d. The constant does not contribute.
    VarVector grad_imag(const VarVector& d) const;

    /// Value and gradient in one pass.
    double eval_imag_with_grad(const VarVector& d, double c, VarVector& grad) const;

    friend bool operator==(const BilinearForm& a, const BilinearForm& b) {
        return a.terms_ == b.terms_ && a.has_constant_ == b.has_constant_;
    }

private:
    struct SignedTerm {
        double coeff;  // coefficient times (-1)^(degree/2)
        Exponents e;
    };

    std::vector<Term> terms_;
    std::vector<SignedTerm> signed_;
    bool has_constant_ = false;
    int max_degree_ = 0;
};

struct BilinearSystem {
    std::string name;
    BilinearForm f1;
    BilinearForm f2;
    std::array<std::string, kNumVars> variable_names{"t", "z", "x"};

    friend bool operator==(const BilinearSystem&, const BilinearSystem&) = default;
};

/// Registered names: "coupled-ramani" (v0 scales the D_x^2 term of F2) and
/// "hirota-satsuma" (v0 ignored; constant slots appended to both forms,
/// an extrapolation since the source bilinear forms carry none).
BilinearSystem builtin_system(std::string_view name, double v0 = 0.0);

std::vector<std::string> builtin_names();

/// Scalar Ramani form (D_x^6 - 5 D_x^3 D_t - 5 D_t^2 + c), the l = 0
/// reduction of the first coupled-Ramani equation.
BilinearForm ramani_form();

}  // namespace nperiodic
