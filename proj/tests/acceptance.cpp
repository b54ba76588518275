// Acceptance gate: one [PASS]/[FAIL] line per criterion, measured values
// included. Exits nonzero if any criterion fails. Each criterion runs inside
// a try block so a failure in one never hides the others.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fwc/fwc.hpp"

namespace {

using namespace fwc;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int criterion, const std::string& label, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// --- criterion 1: spin algebra --------------------------------------------

void criterion_1() {
    const std::complex<double> i1(0.0, 1.0);
    double comm = 0.0, casimir = 0.0, trace = 0.0, overlen = 0.0, covar = 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (double S : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0}) {
        const auto sm = spin::spin_matrices(S);
        comm = std::max(comm, max_abs(sm.sx * sm.sy - sm.sy * sm.sx - i1 * sm.sz));
        comm = std::max(comm, max_abs(sm.sy * sm.sz - sm.sz * sm.sy - i1 * sm.sx));
        comm = std::max(comm, max_abs(sm.sz * sm.sx - sm.sx * sm.sz - i1 * sm.sy));
        const Eigen::MatrixXcd cas = sm.sx * sm.sx + sm.sy * sm.sy + sm.sz * sm.sz -
                                     S * (S + 1.0) *
                                         Eigen::MatrixXcd::Identity(sm.dim, sm.dim);
        casimir = std::max(casimir, max_abs(cas));

        if (S < 1.0) continue;
        std::mt19937_64 rng(1000 + static_cast<unsigned>(2.0 * S));
        for (int k = 0; k < 100; ++k) {
            const Eigen::VectorXcd chi = spin::random_state(sm.dim, rng);
            const Eigen::Vector3d p = spin::polarization_vector(sm, chi);
            const Eigen::Matrix3d t = spin::polarization_tensor(sm, chi);
            trace = std::max(trace, std::abs(t.trace()));
            overlen = std::max(overlen, p.norm() - 1.0);

            Eigen::Vector3d axis(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0,
                                 2.0 * unit(rng) - 1.0);
            if (axis.norm() < 1e-3) axis = Eigen::Vector3d::UnitZ();
            axis.normalize();
            const double angle = 2.0 * M_PI * unit(rng);
            const Eigen::VectorXcd chi_rot = spin::rotate_state(sm, chi, axis, angle);
            const Eigen::Vector3d p_rot = spin::polarization_vector(sm, chi_rot);
            const Eigen::Vector3d p_ref = spin::rotation_matrix(axis, angle) * p;
            covar = std::max(covar, (p_rot - p_ref).cwiseAbs().maxCoeff());
        }
    }

    const bool ok = comm <= 1e-12 && casimir <= 1e-12 && trace <= 1e-12 &&
                    overlen <= 1e-12 && covar <= 1e-10;
    report(1, "spin algebra: commutators, Casimir, tensor trace, |P| bound, covariance",
           ok,
           "commutator " + fmt(comm) + ", Casimir " + fmt(casimir) + ", trace " +
               fmt(trace) + ", |P|-1 " + fmt(overlen) + ", covariance " + fmt(covar));
}

// --- criterion 2: tensor point values --------------------------------------

void criterion_2() {
    const auto sm = spin::spin_matrices(1.0);
    const double pzz_m1 = spin::polarization_tensor(sm, basis_state(sm, 1.0))(2, 2);
    const double pzz_m0 = spin::polarization_tensor(sm, basis_state(sm, 0.0))(2, 2);
    const double dev = std::max(std::abs(pzz_m1 - 1.0), std::abs(pzz_m0 + 2.0));
    report(2, "S=1 tensor point values: P_zz(|m=1>) = +1, P_zz(|m=0>) = -2",
           dev <= 1e-12, "max deviation " + fmt(dev));
}

// --- criterion 3: WKB momentum round-trip ----------------------------------

void criterion_3() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    double worst = 0.0;
    bool all_present = true;

    for (int draw = 0; draw < 20; ++draw) {
        HamiltonianSpec h;
        h.mass = 0.5 + unit(rng);
        h.units.c = 0.8 + unit(rng);
        h.xmin = -6.0;
        h.xmax = 6.0;
        switch (draw % 4) {
            case 0: h.U = PotentialSpec::harmonic(0.5 + unit(rng), sym(rng)); break;
            case 1: h.U = PotentialSpec::constant(sym(rng)); break;
            case 2: h.U = PotentialSpec::linear(0.5 * sym(rng)); break;
            case 3:
                h.U = PotentialSpec::polynomial({sym(rng), 0.2 * sym(rng), 0.3 * unit(rng)});
                break;
        }
        MomentumPotentialSpec v;
        if (draw % 3 == 1) v.add_term(1, PotentialSpec::constant(0.4 * unit(rng)));
        if (draw % 3 == 2) {
            v.add_term(1, PotentialSpec::harmonic(0.3 * unit(rng), 0.0));
            v.add_term(2, PotentialSpec::constant(0.2 * unit(rng)));
        }
        h.V = v;

        for (int k = 0; k < 5; ++k) {
            const double x = 5.0 * sym(rng);
            const double mc2 = h.rest_energy();
            const double floor_e =
                std::sqrt(mc2 * mc2 + h.V.value_at_rest(x)) + h.U.value(x);
            const double e = floor_e + 0.05 + 2.0 * unit(rng);
            const auto p = wkb::generalized_momentum(h, e, x);
            if (!p) {
                all_present = false;
                continue;
            }
            const double back = eval_classical_hamiltonian(h, x, *p);
            worst = std::max(worst, std::abs(back - e) / std::max(1.0, std::abs(e)));
        }
    }

    report(3, "WKB round-trip H(x, P(E, x)) = E over 20 catalog draws",
           all_present && worst <= 1e-10,
           std::string(all_present ? "all momenta found" : "missing momentum") +
               ", worst relative defect " + fmt(worst));
}

// --- criterion 4: semiclassical level accuracy ------------------------------

void criterion_4() {
    const auto t0 = Clock::now();
    HamiltonianSpec h;
    h.mass = 1.0;
    h.units = {1.0, 10.0};
    h.U = PotentialSpec::harmonic(1.0, 0.0);
    h.xmin = -40.0;
    h.xmax = 40.0;
    const Grid grid = make_grid(h.xmin, h.xmax, 4096);

    const auto table = harness::wkb_level_table(h, grid, 5, 15);
    double worst = 0.0;
    for (const auto& row : table.rows) worst = std::max(worst, row.rel_err);
    const double secs =
        std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - t0)
            .count();

    const bool ok = !table.truncated && table.rows.size() == 11 && worst < 0.01 &&
                    secs < 60.0;
    report(4, "Bohr-Sommerfeld vs dense diagonalization, n = 5..15, rel_err < 1%", ok,
           std::to_string(table.rows.size()) + " levels, worst rel_err " + fmt(worst) +
               ", runtime " + fmt(secs) + " s");
}

// --- criterion 5: Ehrenfest correspondence ----------------------------------

double classical_period(const HamiltonianSpec& h, double x_turn) {
    // Start at a turning point; p first crosses zero upward at the half period.
    std::vector<double> ts;
    for (int i = 0; i <= 4000; ++i) ts.push_back(i * 0.005);
    const auto traj = classical::integrate_trajectory(h, {x_turn, 0.0, 0.0}, 20.0, 1e-10, ts);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double a = traj.samples[i - 1].p, b = traj.samples[i].p;
        if (a < 0.0 && b >= 0.0) {
            const double t0 = traj.samples[i - 1].t, t1 = traj.samples[i].t;
            return 2.0 * (t0 + (t1 - t0) * (-a) / (b - a));
        }
    }
    throw SolverError("classical_period: no momentum zero crossing found");
}

void criterion_5() {
    HamiltonianSpec h;
    h.mass = 1.0;
    h.units = {0.01, 1.0};
    h.U = PotentialSpec::harmonic(1.0, 0.0);
    h.xmin = -2.5;
    h.xmax = 2.5;
    const Grid grid = make_grid(h.xmin, h.xmax, 512);

    // E = H(0, p0) = 1.5 puts the turning points at x = +/-1: amplitude 1.
    const double p0 = std::sqrt(1.25);
    const double amplitude = 1.0;
    const double period = classical_period(h, amplitude);

    harness::PacketSpec packet{0.0, p0, std::sqrt(h.units.hbar)};
    harness::CorrespondenceOptions opt;
    opt.total_steps = 8000;
    const auto rep = harness::correspondence_run(h, grid, packet, period, 8, opt);
    const double rel_dev = rep.max_abs_dev_x / amplitude;

    harness::PacketSpec coeff_packet{0.0, p0, 1.0};  // width = 1.0 * sqrt(hbar)
    const auto study = harness::hbar_scaling_study(h, grid, coeff_packet, period,
                                                   {0.08, 0.04, 0.02, 0.01}, 8, opt);

    const bool ok = rel_dev < 0.01 && study.monotone_flag;
    std::ostringstream rows;
    for (const auto& r : study.rows) rows << " " << fmt(r.max_abs_dev_x);
    report(5, "Ehrenfest: one-period <x> deviation < 1% and monotone hbar scaling", ok,
           "deviation/amplitude " + fmt(rel_dev) + " over period " + fmt(period) +
               ", scaling rows" + rows.str() + (study.monotone_flag ? " (monotone)"
                                                                    : " (NOT monotone)"));
}

// --- criterion 6: spin correspondence ---------------------------------------

void criterion_6() {
    // Constant Omega: quantum polarization vs Rodrigues rotation of P(0).
    const double w = 1.3;
    const Eigen::Vector3d axis = Eigen::Vector3d(0.4, -0.7, 1.1).normalized();
    const OmegaSpec omega = OmegaSpec::constant(w * axis);
    const double t_end = 10.0 * 2.0 * M_PI / w;
    double const_dev = 0.0;
    for (double S : {0.5, 1.0, 2.0}) {
        const auto sm = spin::spin_matrices(S);
        std::mt19937_64 rng(77 + sm.dim);
        const Eigen::VectorXcd chi0 = spin::random_state(sm.dim, rng);
        const auto series = spindyn::evolve_spin_amplitude(omega, S, chi0, t_end, 0.01);
        const auto pol = spindyn::polarization_trajectory(series);
        const Eigen::Vector3d p0 = pol.front().vector;
        for (const auto& s : pol) {
            const Eigen::Vector3d ref = spin::rotation_matrix(axis, w * s.t) * p0;
            const_dev = std::max(const_dev, (s.vector - ref).cwiseAbs().maxCoeff());
        }
    }

    // Seeded tabulated Omega(t): quantum polarization vs the classical ODE.
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> sym(-2.0, 2.0);
    std::vector<double> knots;
    std::vector<Eigen::Vector3d> values;
    for (int i = 0; i <= 10; ++i) {
        knots.push_back(0.4 * i);
        values.emplace_back(sym(rng), sym(rng), sym(rng));
    }
    const OmegaSpec tab = OmegaSpec::tabulated(knots, values);
    const auto sm = spin::spin_matrices(0.5);
    const auto series =
        spindyn::evolve_spin_amplitude(tab, 0.5, basis_state(sm, 0.5), 4.0, 0.001);
    const auto pol = spindyn::polarization_trajectory(series);
    const auto ode = classical::spin_precession_classical(tab, pol.front().vector, 4.0,
                                                          1e-12, series.times);
    double tab_dev = 0.0;
    for (std::size_t i = 0; i < pol.size(); ++i)
        tab_dev = std::max(tab_dev, (pol[i].vector - ode.values[i]).cwiseAbs().maxCoeff());

    const bool ok = const_dev <= 1e-8 && tab_dev <= 1e-6;
    report(6, "spin correspondence: Rodrigues (constant Omega) and classical ODE", ok,
           "constant-Omega deviation " + fmt(const_dev) + " over 10 periods, tabulated " +
               fmt(tab_dev));
}

// --- criterion 7: numerical hygiene ------------------------------------------

void criterion_7() {
    // (a) split-step norm drift over 10^4 steps.
    HamiltonianSpec hq;
    hq.U = PotentialSpec::harmonic(1.0, 0.0);
    hq.xmin = -8.0;
    hq.xmax = 8.0;
    const Grid gq = make_grid(hq.xmin, hq.xmax, 256);
    auto state = quantum::make_gaussian_packet(hq, gq, 1.0, 0.0, 0.5);
    state = quantum::split_step_evolve(hq, std::move(state), 1e-3, 10000);
    const double norm_drift = std::abs(state.norm() - 1.0);

    // (b) classical relative energy drift over 10 periods at tol 1e-10.
    HamiltonianSpec hc;
    hc.U = PotentialSpec::harmonic(1.0, 0.0);
    hc.xmin = -5.0;
    hc.xmax = 5.0;
    const double period = classical_period(hc, 1.0);
    std::vector<double> ts;
    for (int i = 0; i <= 400; ++i) ts.push_back(10.0 * period * i / 400);
    const auto traj =
        classical::integrate_trajectory(hc, {1.0, 0.0, 0.0}, 10.0 * period, 1e-10, ts);

    // (c) free-particle spectrum vs the periodic-grid dispersion relation.
    HamiltonianSpec hf;
    hf.xmin = 0.0;
    hf.xmax = 2.0 * M_PI;
    const Grid gf = make_grid(hf.xmin, hf.xmax, 64);
    auto ks = quantum::kinetic_symbol(hf, gf);
    std::sort(ks.begin(), ks.end());
    const auto spec = quantum::stationary_spectrum(hf, gf, gf.n);
    double spec_dev = 0.0;
    for (int i = 0; i < gf.n; ++i)
        spec_dev = std::max(
            spec_dev, std::abs(spec.eigenvalues(i) - ks[static_cast<std::size_t>(i)]));

    const bool ok = norm_drift <= 1e-12 && traj.energy_drift <= 1e-9 && spec_dev <= 1e-12;
    report(7, "hygiene: norm drift / energy drift / free spectrum", ok,
           "norm drift " + fmt(norm_drift) + " per 1e4 steps, energy drift " +
               fmt(traj.energy_drift) + " over 10 periods, spectrum defect " +
               fmt(spec_dev));
}

// --- criterion 8: order checks -----------------------------------------------

void criterion_8() {
    // (a) second-order convergence in dt of the split-step propagator.
    HamiltonianSpec h;
    h.U = PotentialSpec::harmonic(1.0, 0.0);
    h.xmin = -8.0;
    h.xmax = 8.0;
    const Grid grid = make_grid(h.xmin, h.xmax, 256);
    const double t_end = 0.4;
    auto error_at = [&](double dt) {
        auto coarse = quantum::make_gaussian_packet(h, grid, 1.0, 0.0, 0.5);
        auto fine = coarse;
        coarse = quantum::split_step_evolve(h, std::move(coarse), dt,
                                            static_cast<int>(std::lround(t_end / dt)));
        fine = quantum::split_step_evolve(h, std::move(fine), dt / 8.0,
                                          static_cast<int>(std::lround(8.0 * t_end / dt)));
        return (coarse.psi - fine.psi).cwiseAbs().maxCoeff();
    };
    const double ratio = error_at(0.02) / error_at(0.01);

    // (b) WKB phase derivative vs P/hbar: centered differences of the action
    // under Richardson halving must show observed order >= 1.9.
    HamiltonianSpec hw;
    hw.U = PotentialSpec::harmonic(1.0, 0.0);
    hw.xmin = -5.0;
    hw.xmax = 5.0;
    const double e = 1.5, x = 0.3;
    const double p_exact = *wkb::generalized_momentum(hw, e, x);
    auto phase_derivative = [&](double step) {
        const double fwd = wkb::action_integral(hw, e, 0.0, x + step);
        const double bwd = wkb::action_integral(hw, e, 0.0, x - step);
        return (fwd - bwd) / (2.0 * step * hw.units.hbar);
    };
    const double e1 = std::abs(phase_derivative(0.1) - p_exact / hw.units.hbar);
    const double e2 = std::abs(phase_derivative(0.05) - p_exact / hw.units.hbar);
    const double e3 = std::abs(phase_derivative(0.025) - p_exact / hw.units.hbar);
    const double order1 = std::log2(e1 / e2);
    const double order2 = std::log2(e2 / e3);
    const double order = std::min(order1, order2);

    const bool ok = ratio >= 3.5 && ratio <= 4.5 && order >= 1.9;
    report(8, "order checks: split-step dt ratio in [3.5, 4.5], phase-derivative order",
           ok, "dt error ratio " + fmt(ratio) + ", observed phase-derivative order " +
                   fmt(order));
}

}  // namespace

int main() {
    struct Item {
        int id;
        void (*fn)();
    };
    const Item items[] = {{1, criterion_1}, {2, criterion_2}, {3, criterion_3},
                          {4, criterion_4}, {5, criterion_5}, {6, criterion_6},
                          {7, criterion_7}, {8, criterion_8}};
    for (const auto& item : items) {
        try {
            item.fn();
        } catch (const std::exception& e) {
            report(item.id, "criterion raised an exception", false, e.what());
        }
    }
    if (g_failures == 0) std::printf("all 8 acceptance criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
