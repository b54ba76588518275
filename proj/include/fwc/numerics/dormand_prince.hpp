#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fwc/errors.hpp"

namespace fwc::num {

/// Adaptive Dormand-Prince 5(4) integrator over fixed-size states.
/// The embedded 4th-order solution provides the error estimate; the
/// propagated solution is the 5th-order one. Step acceptance requires the
/// weighted error norm <= 1 with scale tol*(1 + |y_i|) per component, so
/// the tolerance bounds the per-step error in the usual mixed abs/rel sense.
///
/// Sampling: if `sample_times` is nonempty the integrator clamps steps so
/// it lands exactly on each requested time and invokes `on_sample` there;
/// otherwise `on_sample` fires at every accepted step.
template <int N>
class DormandPrince54 {
public:
    using State = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<State(double, const State&)>;

    struct Options {
        double tol = 1e-10;
        double h_init = 0.0;  // 0 -> automatic
        double h_min_factor = 1e-14;
        std::size_t max_steps = 50'000'000;
    };

    template <class OnSample>
    static State integrate(const Rhs& rhs, State y, double t0, double t1, const Options& opt,
                           const std::vector<double>& sample_times, OnSample&& on_sample) {
        if (!(t1 >= t0)) throw NumericError("DormandPrince54: t_end must be >= t_start");
        const bool sampled = !sample_times.empty();
        std::size_t next_sample = 0;
        if (sampled) {
            while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
                on_sample(sample_times[next_sample], y);
                ++next_sample;
            }
        } else {
            on_sample(t0, y);
        }
        if (t1 == t0) return y;

        double t = t0;
        State k1 = rhs(t, y);
        double h_ctrl = opt.h_init > 0.0 ? opt.h_init : initial_step(rhs, t, y, k1, opt.tol);
        const double h_floor = opt.h_min_factor * std::max(std::abs(t1 - t0), 1.0);
        std::size_t steps = 0;

        while (t < t1) {
            if (++steps > opt.max_steps)
                throw NumericError("DormandPrince54: step budget exhausted at t = " +
                                   std::to_string(t));
            double h = h_ctrl;
            bool clamped = false;
            if (h >= t1 - t) {
                h = t1 - t;
                clamped = true;
            }
            bool hit_sample = false;
            if (sampled && next_sample < sample_times.size() &&
                t + h >= sample_times[next_sample] - 1e-14 * std::abs(sample_times[next_sample])) {
                h = sample_times[next_sample] - t;
                hit_sample = true;
                clamped = true;
                if (h <= 0.0) {  // degenerate clamp; emit and move on
                    on_sample(sample_times[next_sample], y);
                    ++next_sample;
                    continue;
                }
            }

            State k2 = rhs(t + c2 * h, y + h * (a21 * k1));
            State k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            State k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            State k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            State k6 =
                rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            State k7 = rhs(t + h, y5);  // FSAL
            State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double err_norm = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
                err_norm = std::max(err_norm, std::abs(err[i]) / sc);
            }
            if (!std::isfinite(err_norm))
                throw NumericError("DormandPrince54: non-finite state at t = " +
                                   std::to_string(t));

            // Steer toward err_norm ~= target rather than the acceptance
            // boundary: accepted steps then carry ~target*tol error, which
            // keeps secular drift (e.g. energy) well under tol per step at a
            // modest cost in step count.
            const double factor =
                err_norm == 0.0 ? max_grow
                                : std::clamp(safety * std::pow(err_norm / target, -0.2),
                                             max_shrink, max_grow);
            if (err_norm <= 1.0) {
                t += h;
                y = y5;
                k1 = k7;
                if (hit_sample) {
                    on_sample(t, y);
                    ++next_sample;
                } else if (!sampled) {
                    on_sample(t, y);
                }
                // A clamped step says nothing about the natural step size;
                // keep the controller's value unless the error demands less.
                if (clamped) {
                    if (factor < 1.0) h_ctrl = std::min(h_ctrl, h * factor);
                } else {
                    h_ctrl = h * factor;
                }
            } else {
                h_ctrl = h * factor;
                if (h_ctrl < h_floor && t < t1)
                    throw NumericError("DormandPrince54: step size underflow near t = " +
                                       std::to_string(t));
            }
        }
        return y;
    }

private:
    static double initial_step(const Rhs& rhs, double t, const State& y, const State& k1,
                               double tol) {
        const double d0 = y.norm();
        const double d1 = k1.norm();
        double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        // one Euler probe to bound the second derivative
        State y1 = y + h * k1;
        State k2 = rhs(t + h, y1);
        const double d2 = (k2 - k1).norm() / h;
        if (std::max(d1, d2) > 1e-15)
            h = std::min(100.0 * h, std::pow(tol / std::max(d1, d2), 1.0 / 5.0));
        return std::max(h, 1e-12);
    }

    static constexpr double safety = 0.9, max_grow = 5.0, max_shrink = 0.2, target = 0.1;

    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // e_i = b_i - b*_i (5th-order weights minus the embedded 4th-order ones)
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
    static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
    static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
    static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
    static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
    static constexpr double e7 = -1.0 / 40.0;
};

}  // namespace fwc::num
