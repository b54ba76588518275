#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fwc/errors.hpp"
#include "fwc/model.hpp"
#include "fwc/numerics/dormand_prince.hpp"

namespace fwc {

/// Angular-velocity input for spin precession: either a constant 3-vector or
/// a time-tabulated series with linear interpolation (no extrapolation).
class OmegaSpec {
public:
    static OmegaSpec constant(const Eigen::Vector3d& v) {
        if (!v.allFinite()) throw ConfigError("OmegaSpec: constant omega must be finite");
        return OmegaSpec(Constant{v});
    }

    static OmegaSpec tabulated(std::vector<double> times, std::vector<Eigen::Vector3d> values) {
        if (times.size() < 2 || times.size() != values.size())
            throw ConfigError("OmegaSpec: tabulation needs >= 2 matched (t, omega) samples");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i]) || !values[i].allFinite())
                throw ConfigError("OmegaSpec: tabulated samples must be finite");
            if (i > 0 && !(times[i] > times[i - 1]))
                throw ConfigError("OmegaSpec: tabulated times must be strictly increasing");
        }
        return OmegaSpec(Tabulated{std::move(times), std::move(values)});
    }

    Eigen::Vector3d value(double t) const {
        if (const auto* c = std::get_if<Constant>(&form_)) return c->v;
        const auto& tab = std::get<Tabulated>(form_);
        if (t < tab.times.front() || t > tab.times.back())
            throw DomainError("OmegaSpec: t = " + std::to_string(t) +
                              " outside the tabulated range");
        const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
        const std::size_t hi = std::min(static_cast<std::size_t>(it - tab.times.begin()),
                                        tab.times.size() - 1);
        const std::size_t lo = hi - (hi > 0 ? 1 : 0);
        if (hi == lo) return tab.values[lo];
        const double w = (t - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
        return (1.0 - w) * tab.values[lo] + w * tab.values[hi];
    }

    bool covers(double t0, double t1) const {
        if (std::holds_alternative<Constant>(form_)) return true;
        const auto& tab = std::get<Tabulated>(form_);
        return tab.times.front() <= t0 && t1 <= tab.times.back();
    }

    /// Upper bound on |omega| over the covered range (exact for constant,
    /// sample-wise max for tabulated; linear interpolation cannot exceed it).
    double max_norm() const {
        if (const auto* c = std::get_if<Constant>(&form_)) return c->v.norm();
        const auto& tab = std::get<Tabulated>(form_);
        double m = 0.0;
        for (const auto& v : tab.values) m = std::max(m, v.norm());
        return m;
    }

    bool is_constant() const { return std::holds_alternative<Constant>(form_); }

private:
    struct Constant {
        Eigen::Vector3d v;
    };
    struct Tabulated {
        std::vector<double> times;
        std::vector<Eigen::Vector3d> values;
    };
    using Form = std::variant<Constant, Tabulated>;

    explicit OmegaSpec(Form f) : form_(std::move(f)) {}
    Form form_;
};

}  // namespace fwc

namespace fwc::classical {

struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
};

struct Trajectory {
    std::vector<PhasePoint> samples;  // strictly increasing t
    double energy_drift = 0.0;        // max relative |H - H0| over the samples
};

/// Hamilton equations of the square-root Hamiltonian:
///   dx/dt = [c^2 p + (1/2) dV/dp] / sqrt(m^2 c^4 + c^2 p^2 + V)
///   dp/dt = -[(1/2) dV/dx] / sqrt(...) - U'(x).
inline std::pair<double, double> hamilton_rhs(const HamiltonianSpec& h, double x, double p) {
    const double rad = h.radicand(x, p);
    if (!(rad > 0.0))
        throw ModelError("hamilton_rhs: nonpositive radicand at (x = " + std::to_string(x) +
                         ", p = " + std::to_string(p) + ")");
    const double root = std::sqrt(rad);
    const double c = h.units.c;
    const double dxdt = (c * c * p + 0.5 * h.V.deriv_p(x, p)) / root;
    const double dpdt = -0.5 * h.V.deriv_x(x, p) / root - h.U.derivative(x);
    return {dxdt, dpdt};
}

namespace detail {
inline std::vector<double> checked_sample_times(std::vector<double> ts, double t0, double t1) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (!ts.empty() && (ts.front() < t0 || ts.back() > t1))
        throw ConfigError("sample times must lie within [t_start, t_end]");
    return ts;
}
}  // namespace detail

/// Adaptive 5(4) integration of Hamilton's equations from `start` to t_end.
/// Samples are recorded at `sample_times` if given, otherwise at every
/// accepted step; the relative energy drift over the samples is reported.
inline Trajectory integrate_trajectory(const HamiltonianSpec& h, PhasePoint start, double t_end,
                                       double tol, std::vector<double> sample_times = {}) {
    if (!(tol >= 1e-12 && tol <= 1e-4))
        throw ConfigError("integrate_trajectory: tol must lie in [1e-12, 1e-4]");
    if (!std::isfinite(start.x) || !std::isfinite(start.p) || !std::isfinite(start.t) ||
        !std::isfinite(t_end))
        throw ConfigError("integrate_trajectory: start and t_end must be finite");
    if (!(t_end >= start.t))
        throw ConfigError("integrate_trajectory: t_end must be >= start time");

    using Stepper = num::DormandPrince54<2>;
    Stepper::State y;
    y << start.x, start.p;

    double last_x = start.x, last_p = start.p, last_t = start.t;
    auto rhs = [&](double t, const Stepper::State& s) -> Stepper::State {
        last_x = s(0);
        last_p = s(1);
        last_t = t;
        const auto [dx, dp] = hamilton_rhs(h, s(0), s(1));
        Stepper::State d;
        d << dx, dp;
        return d;
    };

    const double h0 = eval_classical_hamiltonian(h, start.x, start.p);
    const double h_scale = std::max(std::abs(h0), 1e-300);

    Trajectory traj;
    auto record = [&](double t, const Stepper::State& s) {
        traj.samples.push_back({s(0), s(1), t});
        const double e = eval_classical_hamiltonian(h, s(0), s(1));
        traj.energy_drift = std::max(traj.energy_drift, std::abs(e - h0) / h_scale);
    };

    Stepper::Options opt;
    opt.tol = tol;
    sample_times = detail::checked_sample_times(std::move(sample_times), start.t, t_end);
    try {
        Stepper::integrate(rhs, y, start.t, t_end, opt, sample_times, record);
    } catch (const NumericError& e) {
        throw SolverError(std::string(e.what()) + " near (t = " + std::to_string(last_t) +
                          ", x = " + std::to_string(last_x) + ", p = " + std::to_string(last_p) +
                          ")");
    }
    return traj;
}

struct SpinPath {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> values;
};

/// Integrates the precession equation ds/dt = Omega(t) x s. |s| is a first
/// integral; no renormalization is applied, so the reported path exposes the
/// integrator's true drift.
inline SpinPath spin_precession_classical(const OmegaSpec& omega, const Eigen::Vector3d& s0,
                                          double t_end, double tol,
                                          std::vector<double> sample_times = {}) {
    if (!(s0.norm() > 0.0)) throw ConfigError("spin_precession_classical: |s0| must be > 0");
    if (!(tol >= 1e-12 && tol <= 1e-4))
        throw ConfigError("spin_precession_classical: tol must lie in [1e-12, 1e-4]");
    if (!(t_end >= 0.0)) throw ConfigError("spin_precession_classical: t_end must be >= 0");
    if (!omega.covers(0.0, t_end))
        throw ConfigError("spin_precession_classical: tabulated omega does not cover [0, t_end]");

    using Stepper = num::DormandPrince54<3>;
    Stepper::State y = s0;
    auto rhs = [&](double t, const Stepper::State& s) -> Stepper::State {
        return omega.value(t).cross(Eigen::Vector3d(s));
    };

    SpinPath path;
    auto record = [&](double t, const Stepper::State& s) {
        path.times.push_back(t);
        path.values.emplace_back(s);
    };

    Stepper::Options opt;
    opt.tol = tol;
    sample_times = detail::checked_sample_times(std::move(sample_times), 0.0, t_end);
    Stepper::integrate(rhs, y, 0.0, t_end, opt, sample_times, record);
    return path;
}

}  // namespace fwc::classical
