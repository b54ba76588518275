#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "fwc/errors.hpp"

namespace fwc::num {

/// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of
/// opposite sign. Falls back to bisection whenever the Newton step leaves
/// the bracket or the derivative is unusable. Terminates when the step is
/// below rel_tol*|root| + abs_tol.
template <class F, class DF>
double newton_bisect(F&& f, DF&& df, double lo, double hi, double flo, double fhi,
                     double rel_tol, double abs_tol, int max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverError("newton_bisect: endpoints do not bracket a root");

    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        const double width = hi - lo;
        if (width <= rel_tol * std::abs(x) + abs_tol) return 0.5 * (lo + hi);

        const double d = df(x);
        double next;
        if (d != 0.0 && std::isfinite(d)) {
            next = x - fx / d;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        // Guard against stagnation right at a bracket edge.
        if (next == x) next = 0.5 * (lo + hi);
        x = next;
        fx = f(x);
    }
    return 0.5 * (lo + hi);
}

/// Bisection refined to a position tolerance; assumes f(lo), f(hi) of
/// opposite sign (or zero at an end). Returns the final bracket.
template <class F>
std::pair<double, double> bisect_bracket(F&& f, double lo, double hi, double flo, double fhi,
                                         double x_tol, int max_iter = 200) {
    if (flo == 0.0) return {lo, lo};
    if (fhi == 0.0) return {hi, hi};
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverError("bisect_bracket: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return {mid, mid};
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return {lo, hi};
}

/// Plain bisection to a position tolerance; assumes f(lo), f(hi) of opposite
/// sign (or zero). Returns the midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double fhi, double x_tol,
              int max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverError("bisect: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace fwc::num
