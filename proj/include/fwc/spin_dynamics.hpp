#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fwc/classical.hpp"
#include "fwc/errors.hpp"
#include "fwc/spin_algebra.hpp"

namespace fwc::spindyn {

/// Matrix Hamiltonian of the spin-amplitude method, H = hbar * (Omega . s),
/// with dimensionless spin matrices so Omega is an angular velocity in both
/// the quantum and the classical picture.
struct SpinHamiltonian {
    double S = 0.0;
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    Eigen::MatrixXcd matrix;
};

inline SpinHamiltonian spin_hamiltonian(const Eigen::Vector3d& omega_value, double S,
                                        double hbar) {
    if (!(hbar > 0.0)) throw ConfigError("spin_hamiltonian: hbar must be positive");
    const spin::SpinMatrices sm = spin::spin_matrices(S);
    SpinHamiltonian sh;
    sh.S = S;
    sh.omega = omega_value;
    sh.matrix = hbar * sm.dot(omega_value);
    return sh;
}

/// Time series of spinor amplitudes chi(t_k) on the uniform step grid
/// t_k = k*dt (plus a trailing partial step landing exactly on t_end).
struct SpinAmplitudeSeries {
    double S = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
};

/// Midpoint exponential propagator: per step chi <- exp(-i Omega(t_mid).s dt) chi,
/// evaluated through the exact exponential of the small Hermitian generator.
/// Each step is exactly unitary; the midpoint rule makes the scheme
/// second-order for time-dependent Omega and exact for constant Omega.
inline SpinAmplitudeSeries evolve_spin_amplitude(const OmegaSpec& omega, double S,
                                                 const Eigen::VectorXcd& chi0, double t_end,
                                                 double dt) {
    const spin::SpinMatrices sm = spin::spin_matrices(S);
    if (chi0.size() != sm.dim)
        throw StateError("evolve_spin_amplitude: chi0 has dimension " +
                         std::to_string(chi0.size()) + ", expected " + std::to_string(sm.dim));
    if (std::abs(chi0.norm() - 1.0) > 1e-10)
        throw StateError("evolve_spin_amplitude: chi0 must be normalized");
    if (!(dt > 0.0)) throw ConfigError("evolve_spin_amplitude: dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("evolve_spin_amplitude: t_end must be >= 0");
    if (!omega.covers(0.0, t_end))
        throw ConfigError("evolve_spin_amplitude: tabulated omega does not cover [0, t_end]");
    if (dt * omega.max_norm() > 0.1 + 1e-12)
        throw ConfigError("evolve_spin_amplitude: dt * max|omega| must be <= 0.1 "
                          "(midpoint-rule accuracy guard)");

    SpinAmplitudeSeries series;
    series.S = S;
    series.times.push_back(0.0);
    series.states.push_back(chi0);

    // Constant omega admits one reusable propagator; otherwise rebuild per step.
    std::optional<Eigen::MatrixXcd> fixed_step;
    if (omega.is_constant()) fixed_step = spin::exp_minus_i_dot(sm, dt * omega.value(0.0));

    Eigen::VectorXcd chi = chi0;
    double t = 0.0;
    while (t < t_end) {
        const double step = std::min(dt, t_end - t);
        const bool full = step == dt;
        Eigen::MatrixXcd u;
        if (full && fixed_step) {
            u = *fixed_step;
        } else {
            const double t_mid = t + 0.5 * step;
            u = spin::exp_minus_i_dot(sm, step * omega.value(t_mid));
        }
        chi = u * chi;
        t = full ? t + dt : t_end;
        const double drift = std::abs(chi.norm() - 1.0);
        if (drift > 1e-8)
            throw NumericError("evolve_spin_amplitude: norm drift " + std::to_string(drift) +
                               " at t = " + std::to_string(t));
        series.times.push_back(t);
        series.states.push_back(chi);
    }
    return series;
}

/// Per-sample polarization observables extracted from a spin-amplitude series.
struct PolarizationSample {
    double t = 0.0;
    Eigen::Vector3d vector = Eigen::Vector3d::Zero();
    std::optional<Eigen::Matrix3d> tensor;  // present for S >= 1
};

inline std::vector<PolarizationSample> polarization_trajectory(
    const SpinAmplitudeSeries& series) {
    const spin::SpinMatrices sm = spin::spin_matrices(series.S);
    const bool with_tensor = sm.dim >= 3;
    std::vector<PolarizationSample> out;
    out.reserve(series.times.size());
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        PolarizationSample sample;
        sample.t = series.times[i];
        sample.vector = spin::polarization_vector(sm, series.states[i]);
        if (with_tensor) sample.tensor = spin::polarization_tensor(sm, series.states[i]);
        out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace fwc::spindyn
