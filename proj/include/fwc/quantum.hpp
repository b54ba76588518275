#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "fwc/errors.hpp"
#include "fwc/model.hpp"

namespace fwc::quantum {

using Complex = std::complex<double>;

struct WavefunctionState {
    Grid grid;
    Eigen::VectorXcd psi;
    double time = 0.0;

    double norm() const { return std::sqrt(psi.squaredNorm() * grid.dx); }
};

namespace detail {
inline void require_v_empty(const HamiltonianSpec& h, const char* who) {
    if (!h.V.empty())
        throw ModelError(std::string(who) +
                         ": quantum evolution supports V = 0 only (operator ordering of "
                         "momentum-dependent V under the square root is ambiguous)");
}

inline void require_normalized(const WavefunctionState& s, const char* who,
                               double tol = 1e-8) {
    if (std::abs(s.norm() - 1.0) > tol)
        throw StateError(std::string(who) + ": state is not normalized (norm = " +
                         std::to_string(s.norm()) + ")");
}
}  // namespace detail

/// Relativistic kinetic symbol T(k) = sqrt(m^2 c^4 + c^2 hbar^2 k^2) on the
/// periodic wavenumber grid.
inline std::vector<double> kinetic_symbol(const HamiltonianSpec& h, const Grid& grid) {
    detail::require_v_empty(h, "kinetic_symbol");
    const double c = h.units.c;
    const double hbar = h.units.hbar;
    const double mc2 = h.rest_energy();
    std::vector<double> t(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) {
        const double k = grid.wavenumber(j);
        t[static_cast<std::size_t>(j)] = std::sqrt(mc2 * mc2 + c * c * hbar * hbar * k * k);
    }
    return t;
}

/// Gaussian packet with |psi|^2 standard deviation `width`, centered at x0,
/// boosted to mean momentum p0 by an exact phase ramp, normalized exactly in
/// the discrete L2 norm.
inline WavefunctionState make_gaussian_packet(const HamiltonianSpec& h, const Grid& grid,
                                              double x0, double p0, double width) {
    if (!(width > 0.0)) throw ConfigError("make_gaussian_packet: width must be positive");
    WavefunctionState s;
    s.grid = grid;
    s.psi.resize(grid.n);
    const double hbar = h.units.hbar;
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.position(j);
        const double d = x - x0;
        const double amp = std::exp(-d * d / (4.0 * width * width));
        s.psi(j) = std::polar(amp, p0 * d / hbar);
    }
    const double nrm = s.norm();
    if (!(nrm > 0.0))
        throw ConfigError("make_gaussian_packet: packet has zero mass on the grid");
    s.psi /= nrm;
    return s;
}

/// Fraction of probability mass in the outer 5% of the box on each side;
/// used for the periodic-wraparound warning.
inline double edge_mass_fraction(const WavefunctionState& s, double edge_fraction = 0.05) {
    const double lo = s.grid.xmin + edge_fraction * s.grid.length();
    const double hi = s.grid.xmax - edge_fraction * s.grid.length();
    double edge = 0.0, total = 0.0;
    for (int j = 0; j < s.grid.n; ++j) {
        const double w = std::norm(s.psi(j));
        total += w;
        const double x = s.grid.position(j);
        if (x < lo || x > hi) edge += w;
    }
    return total > 0.0 ? edge / total : 0.0;
}

/// Strang-split evolution exp(-iU dt/2h) exp(-iT dt/h) exp(-iU dt/2h) per
/// step, with the interior half-steps merged. Unitary up to roundoff;
/// second-order accurate in dt.
inline WavefunctionState split_step_evolve(const HamiltonianSpec& h, WavefunctionState state,
                                           double dt, int n_steps) {
    detail::require_v_empty(h, "split_step_evolve");
    if (!(dt > 0.0)) throw ConfigError("split_step_evolve: dt must be positive");
    if (n_steps < 0) throw ConfigError("split_step_evolve: n_steps must be nonnegative");
    detail::require_normalized(state, "split_step_evolve");
    if (n_steps == 0) return state;

    const int n = state.grid.n;
    const double hbar = h.units.hbar;
    const std::vector<double> t_symbol = kinetic_symbol(h, state.grid);

    Eigen::VectorXcd u_half(n), u_full(n), k_phase(n);
    for (int j = 0; j < n; ++j) {
        const double u = h.U.value(state.grid.position(j));
        u_half(j) = std::polar(1.0, -0.5 * u * dt / hbar);
        u_full(j) = std::polar(1.0, -u * dt / hbar);
        k_phase(j) = std::polar(1.0, -t_symbol[static_cast<std::size_t>(j)] * dt / hbar);
    }

    Eigen::FFT<double> fft;
    Eigen::VectorXcd work(n);
    auto kinetic_kick = [&](Eigen::VectorXcd& psi) {
        fft.fwd(work, psi);
        work.array() *= k_phase.array();
        fft.inv(psi, work);
    };

    state.psi.array() *= u_half.array();
    for (int step = 0; step < n_steps; ++step) {
        kinetic_kick(state.psi);
        if (!state.psi.allFinite())
            throw NumericError("split_step_evolve: non-finite amplitude at step " +
                               std::to_string(step + 1) + " (t = " +
                               std::to_string(state.time + (step + 1) * dt) + ")");
        if (step + 1 < n_steps) state.psi.array() *= u_full.array();
    }
    state.psi.array() *= u_half.array();

    state.time += n_steps * dt;
    return state;
}

/// Dense spectral oracle for the V = 0 Hamiltonian. In position space the
/// kinetic part is the circulant kernel c_r = (1/n) sum_m T(k_m) e^{i k_m r dx},
/// so H = circulant(c) + diag(U) is real symmetric.
struct SpectrumResult {
    Grid grid;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, orthonormal in the grid inner product
};

namespace detail {
// Implemented in terms of LAPACK dsyevd through the declaration below; the
// definition lives here so the library stays header-only.
extern "C" void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
                        const int* lda, double* w, double* work, const int* lwork, int* iwork,
                        const int* liwork, int* info);

inline void dense_symmetric_eigensolve(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
    const int n = static_cast<int>(a.rows());
    w.resize(n);
    int info = 0;
    int lwork = -1, liwork = -1;
    double work_query = 0.0;
    int iwork_query = 0;
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), &work_query, &lwork, &iwork_query, &liwork,
            &info);
    if (info != 0) throw NumericError("dense eigensolve: workspace query failed");
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
            &info);
    if (info != 0)
        throw NumericError("dense eigensolve: dsyevd failed with info = " +
                           std::to_string(info));
}
}  // namespace detail

inline SpectrumResult stationary_spectrum(const HamiltonianSpec& h, const Grid& grid,
                                          int n_levels) {
    detail::require_v_empty(h, "stationary_spectrum");
    if (grid.n > 8192)
        throw ConfigError("stationary_spectrum: grid.n must be <= 8192 for the dense solver");
    if (n_levels < 1 || n_levels > grid.n)
        throw ConfigError("stationary_spectrum: n_levels must be in [1, grid.n]");

    const int n = grid.n;
    const std::vector<double> t_symbol = kinetic_symbol(h, grid);

    Eigen::FFT<double> fft;
    Eigen::VectorXcd t_k(n), kernel_c(n);
    for (int j = 0; j < n; ++j) t_k(j) = t_symbol[static_cast<std::size_t>(j)];
    fft.inv(kernel_c, t_k);  // c_r = (1/n) sum_m T(k_m) e^{+2 pi i m r / n}

    const double imag_leak = kernel_c.imag().cwiseAbs().maxCoeff();
    const double scale = std::abs(kernel_c(0).real()) + 1.0;
    if (imag_leak > 1e-10 * scale)
        throw NumericError("stationary_spectrum: kinetic kernel is not real (leak = " +
                           std::to_string(imag_leak) + ")");

    Eigen::MatrixXd mat(n, n);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l <= j; ++l) {
            const double v = kernel_c((j - l) % n).real();
            mat(j, l) = v;
            mat(l, j) = v;
        }
        mat(j, j) += h.U.value(grid.position(j));
    }

    Eigen::VectorXd w;
    detail::dense_symmetric_eigensolve(mat, w);  // ascending; columns of mat = vectors

    SpectrumResult out;
    out.grid = grid;
    out.eigenvalues = w.head(n_levels);
    // LAPACK columns have unit Euclidean norm; rescale to the grid inner
    // product sum v^2 dx = 1.
    out.eigenvectors = mat.leftCols(n_levels) / std::sqrt(grid.dx);
    return out;
}

enum class Observable { position, momentum, energy };

/// <x> by nodewise quadrature, <p> through the spectral transform, <H> as
/// kinetic-symbol average plus potential quadrature. All three are real by
/// construction.
inline double expectation(const HamiltonianSpec& h, const WavefunctionState& s,
                          Observable what) {
    detail::require_normalized(s, "expectation");
    const int n = s.grid.n;
    switch (what) {
        case Observable::position: {
            double num = 0.0, den = 0.0;
            for (int j = 0; j < n; ++j) {
                const double w = std::norm(s.psi(j));
                num += s.grid.position(j) * w;
                den += w;
            }
            return num / den;
        }
        case Observable::momentum: {
            Eigen::FFT<double> fft;
            Eigen::VectorXcd c(n);
            Eigen::VectorXcd psi_copy = s.psi;
            fft.fwd(c, psi_copy);
            double num = 0.0, den = 0.0;
            for (int j = 0; j < n; ++j) {
                const double w = std::norm(c(j));
                num += h.units.hbar * s.grid.wavenumber(j) * w;
                den += w;
            }
            return num / den;
        }
        case Observable::energy: {
            const std::vector<double> t_symbol = kinetic_symbol(h, s.grid);
            Eigen::FFT<double> fft;
            Eigen::VectorXcd c(n);
            Eigen::VectorXcd psi_copy = s.psi;
            fft.fwd(c, psi_copy);
            double kin_num = 0.0, den = 0.0;
            for (int j = 0; j < n; ++j) {
                const double w = std::norm(c(j));
                kin_num += t_symbol[static_cast<std::size_t>(j)] * w;
                den += w;
            }
            double pot = 0.0, pden = 0.0;
            for (int j = 0; j < n; ++j) {
                const double w = std::norm(s.psi(j));
                pot += h.U.value(s.grid.position(j)) * w;
                pden += w;
            }
            return kin_num / den + pot / pden;
        }
    }
    throw ConfigError("expectation: unknown observable");
}

}  // namespace fwc::quantum
