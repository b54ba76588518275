#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fwc/errors.hpp"
#include "fwc/numerics/cubic_spline.hpp"

namespace fwc {

/// hbar and c are free parameters so the classical limit hbar -> 0 can be
/// probed numerically instead of being frozen into natural units.
struct UnitSystem {
    double hbar = 1.0;
    double c = 1.0;

    void validate() const {
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw ConfigError("UnitSystem: hbar must be positive and finite");
        if (!(c > 0.0) || !std::isfinite(c))
            throw ConfigError("UnitSystem: c must be positive and finite");
    }
};

/// One-dimensional scalar potential. Tabulated entries are interpolated by
/// a natural cubic spline and refuse to extrapolate.
class PotentialSpec {
public:
    struct Zero {};
    struct Constant {
        double value;
    };
    struct Linear {
        double slope;  // U(x) = slope * x
    };
    struct Harmonic {
        double k;
        double x0;  // U(x) = k*(x - x0)^2 / 2
    };
    struct PolynomialInX {
        std::vector<double> coeffs;  // U(x) = sum_i coeffs[i] * x^i
    };
    struct Tabulated {
        std::vector<double> xs;
        std::vector<double> values;
        num::CubicSpline spline;
    };
    using Form = std::variant<Zero, Constant, Linear, Harmonic, PolynomialInX, Tabulated>;

    PotentialSpec() : form_(Zero{}) {}

    static PotentialSpec zero() { return PotentialSpec(Zero{}); }
    static PotentialSpec constant(double v) { return PotentialSpec(Constant{v}); }
    static PotentialSpec linear(double slope) { return PotentialSpec(Linear{slope}); }
    static PotentialSpec harmonic(double k, double x0) { return PotentialSpec(Harmonic{k, x0}); }
    static PotentialSpec polynomial(std::vector<double> coeffs) {
        return PotentialSpec(PolynomialInX{std::move(coeffs)});
    }
    static PotentialSpec tabulated(std::vector<double> xs, std::vector<double> values) {
        num::CubicSpline spline(xs, values);
        return PotentialSpec(Tabulated{std::move(xs), std::move(values), std::move(spline)});
    }

    double value(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Zero>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, Constant>) {
                    return f.value;
                } else if constexpr (std::is_same_v<T, Linear>) {
                    return f.slope * x;
                } else if constexpr (std::is_same_v<T, Harmonic>) {
                    const double d = x - f.x0;
                    return 0.5 * f.k * d * d;
                } else if constexpr (std::is_same_v<T, PolynomialInX>) {
                    double acc = 0.0;
                    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it)
                        acc = acc * x + *it;
                    return acc;
                } else {
                    return f.spline(x);
                }
            },
            form_);
    }

    double derivative(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Zero> || std::is_same_v<T, Constant>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, Linear>) {
                    return f.slope;
                } else if constexpr (std::is_same_v<T, Harmonic>) {
                    return f.k * (x - f.x0);
                } else if constexpr (std::is_same_v<T, PolynomialInX>) {
                    double acc = 0.0;
                    const auto& c = f.coeffs;
                    for (std::size_t i = c.size(); i-- > 1;)
                        acc = acc * x + static_cast<double>(i) * c[i];
                    return acc;
                } else {
                    return f.spline.derivative(x);
                }
            },
            form_);
    }

    bool is_identically_zero() const { return std::holds_alternative<Zero>(form_); }
    const Form& form() const { return form_; }

private:
    explicit PotentialSpec(Form f) : form_(std::move(f)) {}
    Form form_;
};

inline double eval_potential(const PotentialSpec& p, double x) { return p.value(x); }

/// Momentum-dependent potential V(x, p) = sum_k c_k(x) * p^(2k). Only even
/// powers are admitted, which keeps H real and even in p and makes the
/// momentum inversion single-valued on the positive branch.
class MomentumPotentialSpec {
public:
    struct Term {
        unsigned k;  // contributes coeff(x) * p^(2k)
        PotentialSpec coeff;
    };

    MomentumPotentialSpec() = default;
    explicit MomentumPotentialSpec(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static MomentumPotentialSpec none() { return MomentumPotentialSpec(); }

    void add_term(unsigned k, PotentialSpec coeff) { terms_.push_back({k, std::move(coeff)}); }

    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    double value(double x, double p) const {
        const double psq = p * p;
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.coeff.value(x) * ipow(psq, t.k);
        return acc;
    }

    /// V(x, 0): only the k = 0 term survives.
    double value_at_rest(double x) const {
        double acc = 0.0;
        for (const auto& t : terms_)
            if (t.k == 0) acc += t.coeff.value(x);
        return acc;
    }

    double deriv_x(double x, double p) const {
        const double psq = p * p;
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.coeff.derivative(x) * ipow(psq, t.k);
        return acc;
    }

    double deriv_p(double x, double p) const {
        const double psq = p * p;
        double acc = 0.0;
        for (const auto& t : terms_)
            if (t.k >= 1) acc += t.coeff.value(x) * 2.0 * t.k * p * ipow(psq, t.k - 1);
        return acc;
    }

    /// dV/d(p^2) as a function of p^2; used to certify that the momentum
    /// inversion residual is monotone.
    double deriv_psq(double x, double psq) const {
        double acc = 0.0;
        for (const auto& t : terms_)
            if (t.k >= 1) acc += t.coeff.value(x) * t.k * ipow(psq, t.k - 1);
        return acc;
    }

private:
    static double ipow(double base, unsigned e) {
        double r = 1.0;
        while (e) {
            if (e & 1u) r *= base;
            base *= base;
            e >>= 1u;
        }
        return r;
    }

    std::vector<Term> terms_;
};

/// The square-root Hamiltonian H(x, p) = sqrt(m^2 c^4 + c^2 p^2 + V(x, p)) + U(x),
/// positive branch only. Transverse momentum constants are folded into the
/// k = 0 term of V.
struct HamiltonianSpec {
    double mass = 1.0;
    UnitSystem units;
    PotentialSpec U;
    MomentumPotentialSpec V;
    double xmin = -10.0;
    double xmax = 10.0;

    void validate() const {
        units.validate();
        if (!(mass >= 0.0) || !std::isfinite(mass))
            throw ConfigError("HamiltonianSpec: mass must be nonnegative and finite");
        if (!(xmax > xmin))
            throw ConfigError("HamiltonianSpec: domain must satisfy xmax > xmin");
    }

    double rest_energy() const { return mass * units.c * units.c; }

    double radicand(double x, double p) const {
        const double c = units.c;
        const double mc2 = mass * c * c;
        return mc2 * mc2 + c * c * p * p + V.value(x, p);
    }
};

inline double eval_classical_hamiltonian(const HamiltonianSpec& h, double x, double p) {
    const double r = h.radicand(x, p);
    if (r < 0.0)
        throw ModelError("eval_classical_hamiltonian: negative radicand at (x = " +
                         std::to_string(x) + ", p = " + std::to_string(p) + ")");
    return std::sqrt(r) + h.U.value(x);
}

/// Uniform periodic grid x_j = xmin + j*dx, j = 0..n-1 (left-closed), with
/// the standard FFT wavenumber layout: k_j = 2*pi*j/L for j <= n/2 and
/// 2*pi*(j-n)/L above, so max |k| = pi/dx at the Nyquist index.
struct Grid {
    int n = 0;
    double xmin = 0.0;
    double xmax = 0.0;
    double dx = 0.0;

    double length() const { return xmax - xmin; }

    double position(int j) const { return xmin + j * dx; }

    double wavenumber(int j) const {
        const int f = j <= n / 2 ? j : j - n;
        return 2.0 * M_PI * f / length();
    }

    std::vector<double> positions() const {
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = position(j);
        return xs;
    }

    std::vector<double> wavenumbers() const {
        std::vector<double> ks(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) ks[static_cast<std::size_t>(j)] = wavenumber(j);
        return ks;
    }
};

inline Grid make_grid(double xmin, double xmax, int n) {
    if (!(xmax > xmin)) throw ConfigError("make_grid: xmax must exceed xmin");
    const bool pow2 = n >= 8 && (n & (n - 1)) == 0;
    if (!pow2) throw ConfigError("make_grid: n must be a power of two >= 8, got " +
                                 std::to_string(n));
    Grid g;
    g.n = n;
    g.xmin = xmin;
    g.xmax = xmax;
    g.dx = (xmax - xmin) / n;
    return g;
}

}  // namespace fwc
