// fw-classical: command-line front end for the semiclassical laboratory.
//
// Subcommands: wkb, wkb-levels, spectrum, evolve, trajectory, precess, spin,
// correspond, scaling. Each reads one JSON config (sections: units,
// hamiltonian, grid, packet, omega, run), writes one CSV with a single '#'
// header line, and exits 0 on success, 2 on configuration errors, 3 on
// numerical failures.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fwc/fwc.hpp"

namespace {

using fwc::config::get_or;
using fwc::config::json;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 2026;
};

struct LoadedConfig {
    json root = json::object();
    fwc::UnitSystem units;
    fwc::HamiltonianSpec hamiltonian;
    json run = json::object();
};

LoadedConfig load(const CommonArgs& args) {
    LoadedConfig cfg;
    if (!args.config_path.empty()) cfg.root = fwc::config::load_json_file(args.config_path);
    cfg.units = fwc::config::parse_units(cfg.root);
    cfg.hamiltonian = fwc::config::parse_hamiltonian(
        cfg.root.contains("hamiltonian") ? cfg.root.at("hamiltonian") : json::object(),
        cfg.units);
    if (cfg.root.contains("run")) {
        cfg.run = cfg.root.at("run");
        if (!cfg.run.is_object()) throw fwc::ConfigError("run: expected an object");
    }
    return cfg;
}

fwc::Grid grid_or_default(const LoadedConfig& cfg, int default_n = 512) {
    if (cfg.root.contains("grid"))
        return fwc::config::parse_grid(cfg.root.at("grid"), cfg.hamiltonian);
    return fwc::make_grid(cfg.hamiltonian.xmin, cfg.hamiltonian.xmax, default_n);
}

fwc::harness::PacketSpec packet_required(const LoadedConfig& cfg) {
    if (!cfg.root.contains("packet"))
        throw fwc::ConfigError("this subcommand needs a 'packet' section in the config");
    return fwc::config::parse_packet(cfg.root.at("packet"));
}

fwc::OmegaSpec omega_required(const LoadedConfig& cfg) {
    if (!cfg.root.contains("omega"))
        throw fwc::ConfigError("this subcommand needs an 'omega' section in the config");
    return fwc::config::parse_omega(cfg.root.at("omega"));
}

double run_number(const LoadedConfig& cfg, const std::string& key,
                  std::optional<double> cli_value, std::optional<double> fallback = {}) {
    if (cli_value) return *cli_value;
    if (cfg.run.contains(key))
        return fwc::config::detail::get_number<double>(cfg.run.at(key), "run." + key);
    if (fallback) return *fallback;
    throw fwc::ConfigError("missing 'run." + key + "' (no command-line override given)");
}

std::vector<double> uniform_times(double t_end, int samples) {
    if (samples < 1) throw fwc::ConfigError("run.samples must be >= 1");
    std::vector<double> ts(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i)
        ts[static_cast<std::size_t>(i)] = t_end * i / samples;
    return ts;
}

// ---------------------------------------------------------------------------

int run_wkb(const CommonArgs& args, std::optional<double> energy_flag) {
    const LoadedConfig cfg = load(args);
    const fwc::Grid grid = grid_or_default(cfg);
    const double energy = run_number(cfg, "energy", energy_flag);

    const auto sol = fwc::wkb::wkb_solution(cfg.hamiltonian, energy, grid);
    const auto diag = fwc::wkb::wkb_validity(cfg.hamiltonian, energy, grid);

    fwc::io::CsvWriter csv(args.out_path,
                           {"x", "P", "lambda", "dlambda_dx", "allowed", "violation"});
    for (int j = 0; j < grid.n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const bool allowed = sol.momentum[ju].has_value();
        csv.row({grid.position(j), allowed ? *sol.momentum[ju] : 0.0, diag.lambda[ju],
                 diag.dlambda_dx[ju], allowed ? 1.0 : 0.0, diag.violation[ju] ? 1.0 : 0.0});
    }
    csv.close();
    if (diag.long_range_caution)
        std::cerr << "warning: potential still varies at the domain edge on a scale "
                     "larger than the box; WKB tails may be unreliable\n";
    return 0;
}

int run_wkb_levels(const CommonArgs& args, const std::string& n_range) {
    const LoadedConfig cfg = load(args);
    int n_min = 0, n_max = 10;
    if (!n_range.empty()) {
        const auto pos = n_range.find("..");
        if (pos == std::string::npos)
            throw fwc::ConfigError("--n expects the form A..B, got '" + n_range + "'");
        try {
            n_min = std::stoi(n_range.substr(0, pos));
            n_max = std::stoi(n_range.substr(pos + 2));
        } catch (const std::exception&) {
            throw fwc::ConfigError("--n expects integers in the form A..B");
        }
    } else {
        n_min = static_cast<int>(run_number(cfg, "n_min", {}, 0.0));
        n_max = static_cast<int>(run_number(cfg, "n_max", {}, 10.0));
    }

    const auto levels = fwc::wkb::bohr_sommerfeld_levels(cfg.hamiltonian, n_min, n_max);
    fwc::io::CsvWriter csv(args.out_path, {"n", "E_n", "action_residual"});
    for (const auto& lv : levels)
        csv.row({static_cast<double>(lv.n), lv.energy, lv.residual});
    csv.close();
    if (static_cast<int>(levels.size()) != n_max - n_min + 1 && n_min <= n_max)
        std::cerr << "warning: well supports only " << levels.size()
                  << " of the requested levels; table truncated\n";
    return 0;
}

int run_spectrum(const CommonArgs& args, std::optional<double> levels_flag) {
    const LoadedConfig cfg = load(args);
    const fwc::Grid grid = grid_or_default(cfg);
    const int levels = static_cast<int>(run_number(cfg, "levels", levels_flag, 8.0));

    const auto spec = fwc::quantum::stationary_spectrum(cfg.hamiltonian, grid, levels);
    fwc::io::CsvWriter csv(args.out_path, {"n", "E_n"});
    for (int n = 0; n < spec.eigenvalues.size(); ++n)
        csv.row({static_cast<double>(n), spec.eigenvalues(n)});
    csv.close();
    return 0;
}

int run_evolve(const CommonArgs& args, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    const fwc::Grid grid = grid_or_default(cfg);
    const auto packet = packet_required(cfg);
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const int samples = static_cast<int>(run_number(cfg, "samples", {}, 50.0));
    const int steps = static_cast<int>(run_number(cfg, "steps", {}, 10000.0));
    if (samples < 1) throw fwc::ConfigError("run.samples must be >= 1");
    if (steps < samples) throw fwc::ConfigError("run.steps must be >= run.samples");

    auto state = fwc::quantum::make_gaussian_packet(cfg.hamiltonian, grid, packet.x0,
                                                    packet.p0, packet.width);
    using fwc::quantum::Observable;
    fwc::io::CsvWriter csv(args.out_path, {"t", "mean_x", "mean_p", "mean_H", "norm"});
    bool warned = false;
    auto emit = [&](const fwc::quantum::WavefunctionState& s) {
        csv.row({s.time, fwc::quantum::expectation(cfg.hamiltonian, s, Observable::position),
                 fwc::quantum::expectation(cfg.hamiltonian, s, Observable::momentum),
                 fwc::quantum::expectation(cfg.hamiltonian, s, Observable::energy),
                 s.norm()});
        if (!warned && fwc::quantum::edge_mass_fraction(s) >= 1e-8) {
            std::cerr << "warning: >= 1e-8 probability mass in the outer 5% of the box; "
                         "periodic wraparound may contaminate the run\n";
            warned = true;
        }
    };

    emit(state);
    if (t_end > 0.0) {
        const int per_chunk = std::max(1, (steps + samples - 1) / samples);
        const double dt = (t_end / samples) / per_chunk;
        for (int i = 0; i < samples; ++i) {
            state = fwc::quantum::split_step_evolve(cfg.hamiltonian, std::move(state), dt,
                                                    per_chunk);
            emit(state);
        }
    }
    csv.close();
    return 0;
}

int run_trajectory(const CommonArgs& args, std::optional<double> x0_flag,
                   std::optional<double> p0_flag, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    double x0 = 0.0, p0 = 0.0;
    if (cfg.root.contains("packet")) {
        const auto packet = fwc::config::parse_packet(cfg.root.at("packet"));
        x0 = packet.x0;
        p0 = packet.p0;
    }
    x0 = run_number(cfg, "x0", x0_flag, x0);
    p0 = run_number(cfg, "p0", p0_flag, p0);
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const double tol = run_number(cfg, "tol", {}, 1e-10);
    const int samples = static_cast<int>(run_number(cfg, "samples", {}, 200.0));

    const auto traj = fwc::classical::integrate_trajectory(
        cfg.hamiltonian, {x0, p0, 0.0}, t_end, tol, uniform_times(t_end, samples));
    fwc::io::CsvWriter csv(args.out_path, {"t", "x", "p", "H"});
    for (const auto& s : traj.samples)
        csv.row({s.t, s.x, s.p, fwc::eval_classical_hamiltonian(cfg.hamiltonian, s.x, s.p)});
    csv.close();
    std::cout << "energy_drift = " << traj.energy_drift << "\n";
    return 0;
}

Eigen::Vector3d s0_from_run(const LoadedConfig& cfg) {
    if (!cfg.run.contains("s0")) return {0.0, 0.0, 1.0};
    const auto v = fwc::config::detail::get_number_array(cfg.run.at("s0"), "run.s0");
    if (v.size() != 3) throw fwc::ConfigError("run.s0: expected 3 components");
    return {v[0], v[1], v[2]};
}

int run_precess(const CommonArgs& args, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    const auto omega = omega_required(cfg);
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const double tol = run_number(cfg, "tol", {}, 1e-10);
    const int samples = static_cast<int>(run_number(cfg, "samples", {}, 200.0));

    const auto path = fwc::classical::spin_precession_classical(
        omega, s0_from_run(cfg), t_end, tol, uniform_times(t_end, samples));
    fwc::io::CsvWriter csv(args.out_path, {"t", "s_x", "s_y", "s_z"});
    for (std::size_t i = 0; i < path.times.size(); ++i)
        csv.row({path.times[i], path.values[i](0), path.values[i](1), path.values[i](2)});
    csv.close();
    return 0;
}

int run_spin(const CommonArgs& args, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    const auto omega = omega_required(cfg);
    const double spin_s = run_number(cfg, "S", {});
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const auto sm = fwc::spin::spin_matrices(spin_s);

    double dt;
    if (cfg.run.contains("dt")) {
        dt = fwc::config::detail::get_number<double>(cfg.run.at("dt"), "run.dt");
    } else {
        const double cap = omega.max_norm() > 0.0 ? 0.05 / omega.max_norm() : t_end;
        dt = std::min(cap, t_end > 0.0 ? t_end / 100.0 : cap);
    }

    Eigen::VectorXcd chi0;
    if (cfg.run.contains("chi0")) {
        chi0 = fwc::config::parse_spin_state(cfg.run.at("chi0"), "run.chi0");
        if (chi0.size() != sm.dim)
            throw fwc::ConfigError("run.chi0 has dimension " + std::to_string(chi0.size()) +
                                   ", expected " + std::to_string(sm.dim));
        const double nrm = chi0.norm();
        if (!(nrm > 0.0)) throw fwc::ConfigError("run.chi0 must be nonzero");
        chi0 /= nrm;
    } else {
        std::mt19937_64 rng(args.seed);
        chi0 = fwc::spin::random_state(sm.dim, rng);
    }

    const auto series = fwc::spindyn::evolve_spin_amplitude(omega, spin_s, chi0, t_end, dt);
    const auto pol = fwc::spindyn::polarization_trajectory(series);

    const bool with_tensor = sm.dim >= 3;
    std::vector<std::string> cols = {"t", "P_x", "P_y", "P_z"};
    if (with_tensor)
        for (const char* c : {"P_xx", "P_yy", "P_zz", "P_xy", "P_xz", "P_yz"})
            cols.emplace_back(c);
    fwc::io::CsvWriter csv(args.out_path, cols);
    for (const auto& s : pol) {
        std::vector<double> row = {s.t, s.vector(0), s.vector(1), s.vector(2)};
        if (with_tensor) {
            const auto& t = *s.tensor;
            for (double v : {t(0, 0), t(1, 1), t(2, 2), t(0, 1), t(0, 2), t(1, 2)})
                row.push_back(v);
        }
        csv.row(row);
    }
    csv.close();
    return 0;
}

int run_correspond(const CommonArgs& args, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    const fwc::Grid grid = grid_or_default(cfg);
    const auto packet = packet_required(cfg);
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const int samples = static_cast<int>(run_number(cfg, "samples", {}, 20.0));

    fwc::harness::CorrespondenceOptions opt;
    opt.total_steps = static_cast<int>(run_number(cfg, "total_steps", {}, 20000.0));
    opt.classical_tol = run_number(cfg, "tol", {}, 1e-10);

    const auto rep =
        fwc::harness::correspondence_run(cfg.hamiltonian, grid, packet, t_end, samples, opt);
    fwc::io::CsvWriter csv(args.out_path,
                           {"t", "quantum_x", "quantum_p", "classical_x", "classical_p"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        csv.row({rep.times[i], rep.quantum_mean_x[i], rep.quantum_mean_p[i],
                 rep.classical_x[i], rep.classical_p[i]});
    csv.close();

    std::cout << "max_abs_dev_x = " << rep.max_abs_dev_x << "\n"
              << "max_abs_dev_p = " << rep.max_abs_dev_p << "\n"
              << "wkb_violation_fraction = " << rep.wkb_violation_fraction << "\n";
    if (rep.edge_warning)
        std::cerr << "warning: >= 1e-8 probability mass reached the outer 5% of the box\n";
    return 0;
}

int run_scaling(const CommonArgs& args, std::optional<double> tend_flag) {
    const LoadedConfig cfg = load(args);
    const fwc::Grid grid = grid_or_default(cfg);
    const auto packet = packet_required(cfg);  // width acts as the sqrt(hbar) coefficient
    const double t_end = run_number(cfg, "t_end", tend_flag);
    const int samples = static_cast<int>(run_number(cfg, "samples", {}, 8.0));
    if (!cfg.run.contains("hbar_list"))
        throw fwc::ConfigError("scaling needs 'run.hbar_list' (strictly decreasing)");
    const auto hbar_list =
        fwc::config::detail::get_number_array(cfg.run.at("hbar_list"), "run.hbar_list");

    fwc::harness::CorrespondenceOptions opt;
    opt.total_steps = static_cast<int>(run_number(cfg, "total_steps", {}, 20000.0));

    const auto study = fwc::harness::hbar_scaling_study(cfg.hamiltonian, grid, packet, t_end,
                                                        hbar_list, samples, opt);
    fwc::io::CsvWriter csv(args.out_path, {"hbar", "max_abs_dev_x"});
    for (const auto& r : study.rows) csv.row({r.hbar, r.max_abs_dev_x});
    csv.close();
    std::cout << "monotone = " << (study.monotone_flag ? 1 : 0) << "\n"
              << "floor = " << (study.floor_flag ? 1 : 0) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical laboratory for the relativistic square-root Hamiltonian"};
    app.require_subcommand(1);

    CommonArgs args;
    std::optional<double> energy, tend, x0, p0, levels;
    std::string n_range;

    auto add_common = [&](CLI::App* cmd, bool out_required = true) {
        cmd->add_option("--config", args.config_path, "JSON configuration file");
        auto* out = cmd->add_option("--out", args.out_path, "output CSV path");
        if (out_required) out->required();
        cmd->add_option("--seed", args.seed, "seed for randomized state generation");
    };

    auto* c_wkb = app.add_subcommand("wkb", "per-node generalized momentum and diagnostics");
    add_common(c_wkb);
    c_wkb->add_option("--energy", energy, "total energy E");

    auto* c_lv = app.add_subcommand("wkb-levels", "Bohr-Sommerfeld levels");
    add_common(c_lv);
    c_lv->add_option("--n", n_range, "level range A..B");

    auto* c_sp = app.add_subcommand("spectrum", "dense eigenvalues of the discrete H");
    add_common(c_sp);
    c_sp->add_option("--levels", levels, "number of eigenvalues to emit");

    auto* c_ev = app.add_subcommand("evolve", "split-operator packet evolution");
    add_common(c_ev);
    c_ev->add_option("--tend", tend, "evolution time");

    auto* c_tr = app.add_subcommand("trajectory", "Hamilton-equation orbit");
    add_common(c_tr);
    c_tr->add_option("--x0", x0, "initial position");
    c_tr->add_option("--p0", p0, "initial momentum");
    c_tr->add_option("--tend", tend, "integration time");

    auto* c_pr = app.add_subcommand("precess", "classical spin precession ds/dt = Omega x s");
    add_common(c_pr);
    c_pr->add_option("--tend", tend, "integration time");

    auto* c_sa = app.add_subcommand("spin", "spin-amplitude evolution and polarization");
    add_common(c_sa);
    c_sa->add_option("--tend", tend, "evolution time");

    auto* c_co = app.add_subcommand("correspond", "quantum vs classical correspondence run");
    add_common(c_co);
    c_co->add_option("--tend", tend, "evolution time");

    auto* c_sc = app.add_subcommand("scaling", "hbar scaling study");
    add_common(c_sc);
    c_sc->add_option("--tend", tend, "evolution time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version -> 0, anything else is a config error
    }

    try {
        if (c_wkb->parsed()) return run_wkb(args, energy);
        if (c_lv->parsed()) return run_wkb_levels(args, n_range);
        if (c_sp->parsed()) return run_spectrum(args, levels);
        if (c_ev->parsed()) return run_evolve(args, tend);
        if (c_tr->parsed()) return run_trajectory(args, x0, p0, tend);
        if (c_pr->parsed()) return run_precess(args, tend);
        if (c_sa->parsed()) return run_spin(args, tend);
        if (c_co->parsed()) return run_correspond(args, tend);
        if (c_sc->parsed()) return run_scaling(args, tend);
        throw fwc::ConfigError("no subcommand given");
    } catch (const fwc::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fwc::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fwc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
