#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace fwc::num {

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b] to the
/// requested relative tolerance.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol, int max_depth = 18) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, max_depth, rel_tol);
}

/// Integration of f over [a, b] where f may vanish like sqrt(x - a) and/or
/// sqrt(b - x) at the endpoints. The substitution x = mid + half*sin(theta)
/// turns such endpoint behavior into a smooth integrand, so plain adaptive
/// Gauss-Kronrod converges at spectral speed; for interior-regular f the
/// substitution is harmless.
template <class F>
double integrate_sqrt_endpoints(F&& f, double a, double b, double rel_tol, int max_depth = 18) {
    if (a == b) return 0.0;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double theta) {
        const double x = mid + half * std::sin(theta);
        return f(x) * half * std::cos(theta);
    };
    constexpr double half_pi = 1.5707963267948966;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, -half_pi, half_pi,
                                                                         max_depth, rel_tol);
}

}  // namespace fwc::num
