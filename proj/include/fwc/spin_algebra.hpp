#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "fwc/errors.hpp"

namespace fwc::spin {

using Complex = std::complex<double>;

inline int dimension_of(double S) {
    const double two_s = 2.0 * S;
    const double rounded = std::round(two_s);
    if (!(S > 0.0) || std::abs(two_s - rounded) > 1e-9)
        throw ConfigError("spin: S must be a positive integer or half-integer, got " +
                          std::to_string(S));
    return static_cast<int>(rounded) + 1;
}

/// Spin-S matrices in the |S, m> basis with m descending (row 0 <-> m = S),
/// built from the ladder operators: (s+)_{m+1,m} = sqrt(S(S+1) - m(m+1)).
struct SpinMatrices {
    double S = 0.0;
    int dim = 0;
    Eigen::MatrixXcd sx, sy, sz;

    /// a . s for a real 3-vector a; Hermitian by construction.
    Eigen::MatrixXcd dot(const Eigen::Vector3d& a) const {
        return a.x() * sx + a.y() * sy + a.z() * sz;
    }

    double m_of_index(int i) const { return S - i; }
};

inline SpinMatrices spin_matrices(double S) {
    const int dim = dimension_of(S);
    SpinMatrices sm;
    sm.S = S;
    sm.dim = dim;
    Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(dim, dim);
    sm.sz = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = S - i;
        sm.sz(i, i) = m;
        // s+ |S, m> = sqrt(S(S+1) - m(m+1)) |S, m+1>; m+1 sits at index i-1.
        if (i >= 1) sp(i - 1, i) = std::sqrt(S * (S + 1.0) - m * (m + 1.0));
    }
    const Eigen::MatrixXcd sm_minus = sp.adjoint();
    sm.sx = 0.5 * (sp + sm_minus);
    sm.sy = Complex(0.0, -0.5) * (sp - sm_minus);
    return sm;
}

/// |S, m> as a unit coordinate vector in the descending-m basis.
inline Eigen::VectorXcd basis_state(const SpinMatrices& sm, double m) {
    const double idx = sm.S - m;
    const double rounded = std::round(idx);
    if (std::abs(idx - rounded) > 1e-9 || rounded < 0 || rounded >= sm.dim)
        throw ConfigError("basis_state: m = " + std::to_string(m) +
                          " is not an eigenvalue for S = " + std::to_string(sm.S));
    Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(sm.dim);
    chi(static_cast<int>(rounded)) = 1.0;
    return chi;
}

inline Eigen::VectorXcd random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd chi(dim);
    for (int i = 0; i < dim; ++i) chi(i) = Complex(gauss(rng), gauss(rng));
    const double nrm = chi.norm();
    if (nrm == 0.0) {
        chi.setZero();
        chi(0) = 1.0;
        return chi;
    }
    return chi / nrm;
}

namespace detail {
inline double state_norm_sq(const Eigen::VectorXcd& chi) {
    const double n2 = chi.squaredNorm();
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw StateError("spin: state has zero or non-finite norm");
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
        throw StateError("spin: state is not normalized (norm = " +
                         std::to_string(std::sqrt(n2)) + ")");
    return n2;
}
}  // namespace detail

/// Polarization vector P_i = <s_i> / S.
inline Eigen::Vector3d polarization_vector(const SpinMatrices& sm, const Eigen::VectorXcd& chi) {
    if (chi.size() != sm.dim)
        throw StateError("polarization_vector: state dimension mismatch");
    const double n2 = detail::state_norm_sq(chi);
    Eigen::Vector3d P;
    P.x() = std::real(Complex(chi.adjoint() * sm.sx * chi)) / (sm.S * n2);
    P.y() = std::real(Complex(chi.adjoint() * sm.sy * chi)) / (sm.S * n2);
    P.z() = std::real(Complex(chi.adjoint() * sm.sz * chi)) / (sm.S * n2);
    return P;
}

/// Polarization tensor
///   P_ij = [ 3 <s_i s_j + s_j s_i> - 2 S(S+1) delta_ij ] / [ 2 S (2S - 1) ].
/// Undefined for S = 1/2, where the denominator vanishes (and the numerator
/// is identically zero by the Pauli algebra).
inline Eigen::Matrix3d polarization_tensor(const SpinMatrices& sm, const Eigen::VectorXcd& chi) {
    if (sm.dim < 3)
        throw ModelError("polarization_tensor: undefined for S = 1/2 (2S - 1 = 0)");
    if (chi.size() != sm.dim)
        throw StateError("polarization_tensor: state dimension mismatch");
    const double n2 = detail::state_norm_sq(chi);
    const Eigen::MatrixXcd* s[3] = {&sm.sx, &sm.sy, &sm.sz};
    Eigen::Matrix3d P;
    const double denom = 2.0 * sm.S * (2.0 * sm.S - 1.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const Eigen::MatrixXcd anti = (*s[i]) * (*s[j]) + (*s[j]) * (*s[i]);
            const double expval = std::real(Complex(chi.adjoint() * anti * chi)) / n2;
            const double delta = i == j ? 1.0 : 0.0;
            P(i, j) = (3.0 * expval - 2.0 * sm.S * (sm.S + 1.0) * delta) / denom;
            P(j, i) = P(i, j);
        }
    }
    return P;
}

/// exp(-i a . s) computed by diagonalizing the Hermitian matrix a . s, so the
/// result is unitary to machine precision for any |a|.
inline Eigen::MatrixXcd exp_minus_i_dot(const SpinMatrices& sm, const Eigen::Vector3d& a) {
    const Eigen::MatrixXcd h = sm.dot(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw NumericError("exp_minus_i_dot: eigendecomposition failed");
    const Eigen::VectorXd& w = es.eigenvalues();
    Eigen::VectorXcd phases(sm.dim);
    for (int i = 0; i < sm.dim; ++i) phases(i) = std::exp(Complex(0.0, -w(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Active rotation of the state by angle about the (normalized) axis:
/// chi' = exp(-i angle n . s) chi, under which P transforms as
/// P' = R(axis, angle) P with R the usual right-handed rotation matrix.
inline Eigen::VectorXcd rotate_state(const SpinMatrices& sm, const Eigen::VectorXcd& chi,
                                     const Eigen::Vector3d& axis, double angle) {
    const double len = axis.norm();
    if (!(len > 0.0)) throw ConfigError("rotate_state: axis must be nonzero");
    return exp_minus_i_dot(sm, (angle / len) * axis) * chi;
}

/// Rodrigues rotation matrix R = exp(angle [n]_x): right-handed rotation by
/// angle about the normalized axis.
inline Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& axis, double angle) {
    const double len = axis.norm();
    if (!(len > 0.0)) throw ConfigError("rotation_matrix: axis must be nonzero");
    const Eigen::Vector3d n = axis / len;
    Eigen::Matrix3d K;
    K << 0.0, -n.z(), n.y(),
         n.z(), 0.0, -n.x(),
        -n.y(), n.x(), 0.0;
    return Eigen::Matrix3d::Identity() + std::sin(angle) * K +
           (1.0 - std::cos(angle)) * (K * K);
}

}  // namespace fwc::spin
