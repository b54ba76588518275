#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fwc/classical.hpp"
#include "fwc/errors.hpp"
#include "fwc/model.hpp"
#include "fwc/quantum.hpp"
#include "fwc/wkb.hpp"

namespace fwc::harness {

struct PacketSpec {
    double x0 = 0.0;
    double p0 = 0.0;
    double width = 0.1;  // sigma_x of |psi|^2
};

struct CorrespondenceOptions {
    int total_steps = 20000;      // split-step budget over [0, t_end]
    double classical_tol = 1e-10;
};

struct CorrespondenceReport {
    std::vector<double> times;
    std::vector<double> quantum_mean_x;
    std::vector<double> quantum_mean_p;
    std::vector<double> classical_x;
    std::vector<double> classical_p;
    double max_abs_dev_x = 0.0;
    double max_abs_dev_p = 0.0;
    double wkb_violation_fraction = 0.0;
    bool edge_warning = false;  // >= 1e-8 probability mass in the outer 5% of the box
};

/// Runs the split-operator evolution and the Hamilton-equation trajectory
/// from matched initial data and reports the deviations. The classical orbit
/// starts from the measured packet means (= (x0, p0) up to machine epsilon),
/// so at t = 0 the deviation is identically zero. WKB diagnostics are
/// evaluated at the classical energy H(x0, p0), not <H> (they differ at
/// O(hbar)).
inline CorrespondenceReport correspondence_run(const HamiltonianSpec& h, const Grid& grid,
                                               const PacketSpec& packet, double t_end,
                                               int n_samples,
                                               const CorrespondenceOptions& opt = {}) {
    if (!h.V.empty())
        throw ModelError("correspondence_run: quantum reference requires V = 0");
    if (!(t_end >= 0.0)) throw ConfigError("correspondence_run: t_end must be >= 0");
    if (n_samples < 1) throw ConfigError("correspondence_run: n_samples must be >= 1");
    if (!(packet.width >= 4.0 * grid.dx))
        throw ConfigError("correspondence_run: packet width must be >= 4 grid spacings "
                          "(width = " + std::to_string(packet.width) + ", dx = " +
                          std::to_string(grid.dx) + ")");

    quantum::WavefunctionState state =
        quantum::make_gaussian_packet(h, grid, packet.x0, packet.p0, packet.width);

    CorrespondenceReport report;
    report.edge_warning = quantum::edge_mass_fraction(state) >= 1e-8;

    const double e_match = eval_classical_hamiltonian(h, packet.x0, packet.p0);
    {
        const wkb::WKBDiagnostics diag = wkb::wkb_validity(h, e_match, grid);
        const auto violations = std::count(diag.violation.begin(), diag.violation.end(), true);
        report.wkb_violation_fraction =
            static_cast<double>(violations) / static_cast<double>(grid.n);
    }

    const int n_chunks = t_end > 0.0 ? n_samples : 0;
    report.times.resize(static_cast<std::size_t>(n_chunks) + 1);
    for (int i = 0; i <= n_chunks; ++i)
        report.times[static_cast<std::size_t>(i)] = n_chunks > 0 ? t_end * i / n_chunks : 0.0;

    const double qx0 = quantum::expectation(h, state, quantum::Observable::position);
    const double qp0 = quantum::expectation(h, state, quantum::Observable::momentum);

    report.quantum_mean_x.push_back(qx0);
    report.quantum_mean_p.push_back(qp0);

    if (n_chunks > 0) {
        const int steps_per_chunk =
            std::max(1, (opt.total_steps + n_chunks - 1) / n_chunks);
        const double dt = (t_end / n_chunks) / steps_per_chunk;
        for (int i = 1; i <= n_chunks; ++i) {
            state = quantum::split_step_evolve(h, std::move(state), dt, steps_per_chunk);
            report.quantum_mean_x.push_back(
                quantum::expectation(h, state, quantum::Observable::position));
            report.quantum_mean_p.push_back(
                quantum::expectation(h, state, quantum::Observable::momentum));
            if (quantum::edge_mass_fraction(state) >= 1e-8) report.edge_warning = true;
        }
    }

    const classical::Trajectory traj = classical::integrate_trajectory(
        h, {qx0, qp0, 0.0}, t_end, opt.classical_tol, report.times);
    for (const auto& s : traj.samples) {
        report.classical_x.push_back(s.x);
        report.classical_p.push_back(s.p);
    }
    if (report.classical_x.size() != report.times.size())
        throw NumericError("correspondence_run: classical sampling dropped points");

    for (std::size_t i = 0; i < report.times.size(); ++i) {
        report.max_abs_dev_x = std::max(
            report.max_abs_dev_x, std::abs(report.quantum_mean_x[i] - report.classical_x[i]));
        report.max_abs_dev_p = std::max(
            report.max_abs_dev_p, std::abs(report.quantum_mean_p[i] - report.classical_p[i]));
    }
    return report;
}

struct ScalingRow {
    double hbar = 0.0;
    double max_abs_dev_x = 0.0;
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;  // hbar strictly decreasing
    bool monotone_flag = false;    // deviations strictly decreasing down the rows
    bool floor_flag = false;       // all deviations at the discretization floor
};

/// Repeats correspondence_run across a strictly decreasing hbar list.
/// The packet width scales as width_coeff * sqrt(hbar) (packet.width is the
/// coefficient), which keeps position and momentum spreads balanced so both
/// shrink like sqrt(hbar).
inline ScalingStudy hbar_scaling_study(const HamiltonianSpec& h, const Grid& grid,
                                       const PacketSpec& packet_template, double t_end,
                                       const std::vector<double>& hbar_list, int n_samples,
                                       const CorrespondenceOptions& opt = {}) {
    if (hbar_list.empty()) throw ConfigError("hbar_scaling_study: hbar list is empty");
    for (std::size_t i = 1; i < hbar_list.size(); ++i)
        if (!(hbar_list[i] < hbar_list[i - 1]))
            throw ConfigError("hbar_scaling_study: hbar list must be strictly decreasing");

    ScalingStudy study;
    for (double hbar : hbar_list) {
        HamiltonianSpec h_row = h;
        h_row.units.hbar = hbar;
        h_row.validate();
        PacketSpec p_row = packet_template;
        p_row.width = packet_template.width * std::sqrt(hbar);
        const CorrespondenceReport rep =
            correspondence_run(h_row, grid, p_row, t_end, n_samples, opt);
        study.rows.push_back({hbar, rep.max_abs_dev_x});
    }

    study.monotone_flag = true;
    for (std::size_t i = 1; i < study.rows.size(); ++i)
        if (!(study.rows[i].max_abs_dev_x < study.rows[i - 1].max_abs_dev_x))
            study.monotone_flag = false;

    const double floor = std::max(1e-6 * h.units.c * t_end, 1e-12);
    study.floor_flag = std::all_of(study.rows.begin(), study.rows.end(),
                                   [&](const ScalingRow& r) { return r.max_abs_dev_x <= floor; });
    return study;
}

struct LevelRow {
    int n = 0;
    double e_wkb = 0.0;
    double e_exact = 0.0;
    double rel_err = 0.0;  // |e_wkb - e_exact| / (e_exact - m c^2)
};

struct LevelTable {
    std::vector<LevelRow> rows;
    bool truncated = false;  // semiclassical and exact level counts disagreed
};

/// Joins Bohr-Sommerfeld levels with the dense spectral oracle by index.
inline LevelTable wkb_level_table(const HamiltonianSpec& h, const Grid& grid, int n_min,
                                  int n_max) {
    LevelTable table;
    if (n_min > n_max) return table;
    if (n_min < 0) throw ConfigError("wkb_level_table: n_min must be nonnegative");
    if (!h.V.empty())
        throw ModelError("wkb_level_table: exact reference spectrum requires V = 0");

    const auto bs = wkb::bohr_sommerfeld_levels(h, n_min, n_max);
    const int want = std::min(n_max + 1, grid.n);
    const quantum::SpectrumResult spec = quantum::stationary_spectrum(h, grid, want);

    const double mc2 = h.rest_energy();
    for (const auto& level : bs) {
        if (level.n >= spec.eigenvalues.size()) break;
        LevelRow row;
        row.n = level.n;
        row.e_wkb = level.energy;
        row.e_exact = spec.eigenvalues(level.n);
        const double denom = row.e_exact - mc2;
        row.rel_err = std::abs(row.e_wkb - row.e_exact) /
                      std::max(std::abs(denom), 1e-300);
        table.rows.push_back(row);
    }
    table.truncated = static_cast<int>(table.rows.size()) != n_max - n_min + 1;
    return table;
}

}  // namespace fwc::harness
