#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fwc/errors.hpp"

namespace fwc::num {

/// Natural cubic spline through (x_i, y_i) with strictly increasing knots.
/// Second derivative is zero at both ends; evaluation outside the knot
/// range is a DomainError (no extrapolation).
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n)
            throw ConfigError("CubicSpline: need at least 3 samples with matching lengths");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw ConfigError("CubicSpline: sample positions must be strictly increasing");

        // Tridiagonal solve for the knot second derivatives m_i, natural ends.
        m_.assign(n, 0.0);
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (hl + hr);
            upper[i] = hr;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        // Forward elimination (lower entry of row i is h_{i-1}, zero for rows 0, n-1).
        std::vector<double> c(n, 0.0);
        c[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double lower = (i == 1) ? 0.0 : hl;
            const double denom = diag[i] - lower * c[i - 1];
            c[i] = upper[i] / denom;
            rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) m_[i] = rhs[i] - c[i] * m_[i + 1];
    }

    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

    double operator()(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    double derivative(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }

private:
    std::size_t locate(double x) const {
        if (!(x >= x_.front() && x <= x_.back()))
            throw DomainError("CubicSpline: x = " + std::to_string(x) +
                              " outside tabulated range [" + std::to_string(x_.front()) + ", " +
                              std::to_string(x_.back()) + "]");
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace fwc::num
