#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwc/errors.hpp"
#include "fwc/model.hpp"
#include "fwc/numerics/quadrature.hpp"
#include "fwc/numerics/rootfind.hpp"

namespace fwc::wkb {

namespace detail {

/// (E - U)^2 - m^2 c^4 - V(x, 0): nonnegative exactly where a real
/// generalized momentum exists (together with E >= U).
inline double allowed_excess(const HamiltonianSpec& h, double E, double x) {
    const double w = E - h.U.value(x);
    const double mc2 = h.rest_energy();
    return w * w - mc2 * mc2 - h.V.value_at_rest(x);
}

inline bool allowed(const HamiltonianSpec& h, double E, double x) {
    return E >= h.U.value(x) && allowed_excess(h, E, x) >= 0.0;
}

/// Coarse minimum of U over the declared domain; feeds the initial root
/// bracket P_max = 10 (E + |min U|) / c, which is then doubled as needed.
inline double min_potential_scan(const HamiltonianSpec& h, int n_scan = 64) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_scan; ++i) {
        const double x = h.xmin + (h.xmax - h.xmin) * i / n_scan;
        best = std::min(best, h.U.value(x));
    }
    return best;
}

}  // namespace detail

inline bool classically_allowed(const HamiltonianSpec& h, double E, double x) {
    return detail::allowed(h, E, x);
}

/// Nonnegative root P of E = sqrt(m^2 c^4 + c^2 P^2 + V(x, P)) + U(x), or
/// absent where the point is classically forbidden. For the even-power V
/// catalog the residual is monotone in P^2; a detected violation of that
/// certificate raises SolverError naming x.
inline std::optional<double> generalized_momentum(const HamiltonianSpec& h, double E, double x) {
    if (!std::isfinite(E)) throw ConfigError("generalized_momentum: E must be finite");
    const double w = E - h.U.value(x);
    if (w < 0.0) return std::nullopt;
    const double excess = detail::allowed_excess(h, E, x);
    if (excess < 0.0) return std::nullopt;
    if (excess == 0.0) return 0.0;

    const double c = h.units.c;
    if (h.V.empty()) return std::sqrt(excess) / c;

    auto check_monotone = [&](double psq) {
        if (c * c + h.V.deriv_psq(x, psq) <= 0.0)
            throw SolverError("generalized_momentum: residual not monotone in p^2 at x = " +
                              std::to_string(x));
    };

    // residual g(P) = m^2 c^4 + c^2 P^2 + V(x, P) - (E - U)^2; g(0) = -excess < 0.
    auto g = [&](double p) { return h.radicand(x, p) - w * w; };
    auto dg = [&](double p) { return 2.0 * c * c * p + h.V.deriv_p(x, p); };

    double hi = 10.0 * (std::abs(E) + std::abs(detail::min_potential_scan(h))) / c;
    if (!(hi > 0.0)) hi = 1.0;
    double ghi = g(hi);
    check_monotone(hi * hi);
    int doublings = 0;
    while (ghi < 0.0) {
        if (++doublings > 200)
            throw SolverError("generalized_momentum: failed to bracket the root at x = " +
                              std::to_string(x));
        hi *= 2.0;
        ghi = g(hi);
        check_monotone(hi * hi);
    }

    const double p_scale = (std::abs(E) + h.rest_energy()) / c + 1.0;
    const double root = num::newton_bisect(
        [&](double p) {
            check_monotone(p * p);
            return g(p);
        },
        dg, 0.0, hi, -excess, ghi, 1e-12, 1e-15 * p_scale);
    return root;
}

/// Turning points: boundaries of the classically allowed region inside
/// [xlo, xhi], located by bisecting sign changes of the allowed indicator on
/// an n_scan mesh. Each returned point lies on the forbidden side of a
/// machine-width bracket, so P is absent (zero) there.
inline std::vector<double> turning_points(const HamiltonianSpec& h, double E, double xlo,
                                          double xhi, int n_scan = 512) {
    if (n_scan < 64) throw ConfigError("turning_points: n_scan must be at least 64");
    if (!(xhi > xlo)) throw ConfigError("turning_points: empty scan interval");

    auto indicator = [&](double x) { return detail::allowed(h, E, x) ? 1.0 : -1.0; };

    std::vector<double> pts;
    double x_prev = xlo;
    double s_prev = indicator(x_prev);
    for (int i = 1; i <= n_scan; ++i) {
        const double x = xlo + (xhi - xlo) * i / n_scan;
        const double s = indicator(x);
        if (s != s_prev) {
            const double x_tol = 4.0 * std::numeric_limits<double>::epsilon() *
                                 std::max({1.0, std::abs(x_prev), std::abs(x)});
            auto [a, b] = num::bisect_bracket(indicator, x_prev, x, s_prev, s, x_tol);
            // Report the forbidden-side end, where the momentum is absent.
            pts.push_back(indicator(a) < 0.0 ? a : b);
        }
        x_prev = x;
        s_prev = s;
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

inline std::vector<double> turning_points(const HamiltonianSpec& h, double E, int n_scan = 512) {
    return turning_points(h, E, h.xmin, h.xmax, n_scan);
}

/// Spatial action  integral of P(x) dx over [x0, x1], which must lie within a
/// single classically allowed interval (endpoints may be turning points).
/// A sine substitution absorbs the square-root vanishing of P at turning
/// points, so adaptive Gauss-Kronrod converges rapidly.
inline double action_integral(const HamiltonianSpec& h, double E, double x0, double x1,
                              double rel_tol = 1e-10) {
    if (x0 == x1) return 0.0;
    const double sign = x1 > x0 ? 1.0 : -1.0;
    const double a = std::min(x0, x1);
    const double b = std::max(x0, x1);

    const int n_check = 65;
    for (int i = 0; i < n_check; ++i) {
        const double x = a + (b - a) * (i + 0.5) / n_check;
        if (!detail::allowed(h, E, x))
            throw DomainError("action_integral: [" + std::to_string(a) + ", " +
                              std::to_string(b) + "] crosses a classically forbidden region");
    }

    const double mc2 = h.rest_energy();
    auto integrand = [&](double x) {
        const auto p = generalized_momentum(h, E, x);
        if (p) return *p;
        // Quadrature nodes can land a rounding error beyond a turning-point
        // endpoint; treat a grazing miss as P = 0 and reject real crossings.
        const double scale = mc2 * mc2 + E * E + 1.0;
        if (detail::allowed_excess(h, E, x) >= -1e-10 * scale) return 0.0;
        throw DomainError("action_integral: integrand entered a forbidden region at x = " +
                          std::to_string(x));
    };
    return sign * num::integrate_sqrt_endpoints(integrand, a, b, rel_tol);
}

/// Total action -E t + spatial action.
inline double total_action(double E, double t, double spatial_action) {
    return -E * t + spatial_action;
}

/// Per-grid WKB summary: nodewise momentum (absent where forbidden), the
/// turning points, and the closure of the allowed set as intervals.
struct WKBSolution {
    double energy = 0.0;
    Grid grid;
    std::vector<std::optional<double>> momentum;
    std::vector<double> turning_points;
    std::vector<std::pair<double, double>> allowed_intervals;
};

inline WKBSolution wkb_solution(const HamiltonianSpec& h, double E, const Grid& grid) {
    WKBSolution sol;
    sol.energy = E;
    sol.grid = grid;
    sol.momentum.resize(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j)
        sol.momentum[static_cast<std::size_t>(j)] = generalized_momentum(h, E, grid.position(j));
    sol.turning_points = turning_points(h, E, h.xmin, h.xmax);

    std::vector<double> edges;
    edges.push_back(h.xmin);
    for (double t : sol.turning_points) edges.push_back(t);
    edges.push_back(h.xmax);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] > edges[i])) continue;
        const double mid = 0.5 * (edges[i] + edges[i + 1]);
        if (detail::allowed(h, E, mid)) sol.allowed_intervals.emplace_back(edges[i], edges[i + 1]);
    }
    return sol;
}

enum class AmplitudeMode { zero_order, first_order };

struct WKBWavefunction {
    Grid grid;
    AmplitudeMode mode = AmplitudeMode::zero_order;
    std::vector<std::complex<double>> samples;
    std::vector<double> phase;  // cumulative integral of P/hbar from the first node
};

/// Quasiclassical wavefunction on a grid lying inside one allowed interval.
/// zero_order: Phi = exp(i S(x)/hbar) with S the running action from the
/// first grid node, |Phi| = 1. first_order: additionally weighted by
/// P^{-1/2} and normalized over the grid.
inline WKBWavefunction wkb_wavefunction(const HamiltonianSpec& h, double E, const Grid& grid,
                                        AmplitudeMode mode) {
    std::vector<double> p(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.position(j);
        const auto pj = generalized_momentum(h, E, x);
        if (!pj)
            throw DomainError("wkb_wavefunction: grid touches a forbidden region at x = " +
                              std::to_string(x));
        p[static_cast<std::size_t>(j)] = *pj;
    }

    WKBWavefunction wf;
    wf.grid = grid;
    wf.mode = mode;
    wf.phase.resize(p.size());
    wf.samples.resize(p.size());

    const double hbar = h.units.hbar;
    double action = 0.0;
    wf.phase[0] = 0.0;
    for (int j = 1; j < grid.n; ++j) {
        action += action_integral(h, E, grid.position(j - 1), grid.position(j), 1e-12);
        wf.phase[static_cast<std::size_t>(j)] = action / hbar;
    }

    if (mode == AmplitudeMode::zero_order) {
        for (std::size_t j = 0; j < p.size(); ++j)
            wf.samples[j] = std::polar(1.0, wf.phase[j]);
        return wf;
    }

    double norm_sq = 0.0;
    std::vector<double> amp(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0)
            throw DomainError("wkb_wavefunction: first_order amplitude diverges at a node "
                              "with P = 0 (x = " +
                              std::to_string(grid.position(static_cast<int>(j))) + ")");
        amp[j] = 1.0 / std::sqrt(p[j]);
        norm_sq += amp[j] * amp[j] * grid.dx;
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (std::size_t j = 0; j < p.size(); ++j)
        wf.samples[j] = std::polar(amp[j] * inv_norm, wf.phase[j]);
    return wf;
}

struct ValidityThresholds {
    double dlambda_dx = 0.1;        // flag where |d lambda / dx| exceeds this
    double lambda_over_length = 0.1;  // flag where lambda exceeds this fraction of l
};

/// Nodewise applicability diagnostics for the quasiclassical expansion.
struct WKBDiagnostics {
    Grid grid;
    std::vector<double> lambda;       // de Broglie wavelength, +inf where P = 0 or forbidden
    std::vector<double> dlambda_dx;   // |d lambda / dx|, finite differences
    std::vector<double> char_length;  // |U / U'|, +inf at critical points of U
    std::vector<bool> violation;
    bool long_range_caution = false;
};

inline WKBDiagnostics wkb_validity(const HamiltonianSpec& h, double E, const Grid& grid,
                                   ValidityThresholds thresholds = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = static_cast<std::size_t>(grid.n);
    WKBDiagnostics d;
    d.grid = grid;
    d.lambda.resize(n);
    d.dlambda_dx.resize(n);
    d.char_length.resize(n);
    d.violation.assign(n, false);

    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.position(static_cast<int>(j));
        const auto p = generalized_momentum(h, E, x);
        d.lambda[j] = (p && *p > 0.0) ? 2.0 * M_PI * h.units.hbar / *p : inf;
        const double du = h.U.derivative(x);
        d.char_length[j] = du != 0.0 ? std::abs(h.U.value(x) / du) : inf;
    }

    auto slope = [&](std::size_t lo, std::size_t hi) {
        if (!std::isfinite(d.lambda[lo]) || !std::isfinite(d.lambda[hi])) return inf;
        return std::abs(d.lambda[hi] - d.lambda[lo]) /
               ((static_cast<double>(hi) - static_cast<double>(lo)) * grid.dx);
    };
    for (std::size_t j = 0; j < n; ++j) {
        if (j == 0)
            d.dlambda_dx[j] = n > 1 ? slope(0, 1) : 0.0;
        else if (j == n - 1)
            d.dlambda_dx[j] = slope(n - 2, n - 1);
        else
            d.dlambda_dx[j] = slope(j - 1, j + 1);
    }

    for (std::size_t j = 0; j < n; ++j) {
        const bool forbidden = !std::isfinite(d.lambda[j]);
        const bool steep = d.dlambda_dx[j] >= thresholds.dlambda_dx;
        const bool coarse = std::isfinite(d.char_length[j])
                                ? d.lambda[j] >= thresholds.lambda_over_length * d.char_length[j]
                                : forbidden;
        d.violation[j] = forbidden || steep || coarse;
    }

    // The expansion says nothing beyond the declared domain: if U is still
    // varying at an edge on a scale exceeding the domain itself, flag it.
    const double L = h.xmax - h.xmin;
    for (double edge : {h.xmin, h.xmax}) {
        const double du = h.U.derivative(edge);
        if (du != 0.0 && std::abs(h.U.value(edge) / du) > L) d.long_range_caution = true;
    }
    return d;
}

struct BohrSommerfeldLevel {
    int n = 0;
    double energy = 0.0;
    double residual = 0.0;  // action defect 2*S(E_n) - 2*pi*hbar*(n + 1/2)
};

namespace detail {

/// Locate the two turning points of the well around x_center at energy E by
/// marching outward and bisecting the allowed/forbidden boundary. Returns
/// absent if the allowed region reaches a domain edge (well not contained).
inline std::optional<std::pair<double, double>> well_extent(const HamiltonianSpec& h, double E,
                                                            double x_center) {
    if (!allowed(h, E, x_center)) return std::nullopt;
    const double L = h.xmax - h.xmin;

    auto boundary = [&](double inside, int dir) -> std::optional<double> {
        double step = 1e-6 * L;
        double prev = inside;
        while (true) {
            double probe = prev + dir * step;
            const double limit_lo = h.xmin;
            const double limit_hi = h.xmax;
            if (probe <= limit_lo) probe = limit_lo;
            if (probe >= limit_hi) probe = limit_hi;
            if (!allowed(h, E, probe)) {
                auto ind = [&](double x) { return allowed(h, E, x) ? 1.0 : -1.0; };
                const double x_tol = 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max({1.0, std::abs(prev), std::abs(probe)});
                auto [a, b] = num::bisect_bracket(ind, std::min(prev, probe),
                                                  std::max(prev, probe),
                                                  ind(std::min(prev, probe)),
                                                  ind(std::max(prev, probe)), x_tol);
                return ind(a) < 0.0 ? a : b;
            }
            if (probe == limit_lo || probe == limit_hi) return std::nullopt;
            prev = probe;
            step *= 2.0;
        }
    };

    const auto left = boundary(x_center, -1);
    if (!left) return std::nullopt;
    const auto right = boundary(x_center, +1);
    if (!right) return std::nullopt;
    return std::make_pair(*left, *right);
}

}  // namespace detail

/// Semiclassical levels of a single well: solves the quantization condition
/// 2 * action(turning points) = 2 pi hbar (n + 1/2) for each n by bisection
/// in E; the action is monotone in E for a fixed well. Levels whose action
/// target exceeds what the domain-contained well supports are omitted.
inline std::vector<BohrSommerfeldLevel> bohr_sommerfeld_levels(const HamiltonianSpec& h,
                                                               int n_min, int n_max) {
    if (n_min < 0) throw ConfigError("bohr_sommerfeld_levels: n_min must be nonnegative");
    std::vector<BohrSommerfeldLevel> levels;
    if (n_min > n_max) return levels;

    // Floor of the effective potential sqrt(m^2 c^4 + V(x,0)) + U(x): the
    // lowest energy with any allowed motion.
    auto floor_energy = [&](double x) {
        const double mc2 = h.rest_energy();
        const double rad = mc2 * mc2 + h.V.value_at_rest(x);
        if (rad < 0.0)
            throw ModelError("bohr_sommerfeld_levels: negative rest radicand at x = " +
                             std::to_string(x));
        return std::sqrt(rad) + h.U.value(x);
    };

    const int n_scan = 1024;
    double e_floor = std::numeric_limits<double>::infinity();
    double x_best = h.xmin;
    for (int i = 0; i <= n_scan; ++i) {
        const double x = h.xmin + (h.xmax - h.xmin) * i / n_scan;
        const double e = floor_energy(x);
        if (e < e_floor) {
            e_floor = e;
            x_best = x;
        }
    }
    // Golden-section sharpening of the floor around the best scan node.
    {
        const double dxs = (h.xmax - h.xmin) / n_scan;
        double a = std::max(h.xmin, x_best - dxs);
        double b = std::min(h.xmax, x_best + dxs);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
        double f1 = floor_energy(c1), f2 = floor_energy(c2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - gr * (b - a);
                f1 = floor_energy(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr * (b - a);
                f2 = floor_energy(c2);
            }
        }
        const double xm = 0.5 * (a + b);
        e_floor = std::min(e_floor, floor_energy(xm));
        x_best = xm;
    }

    const double e_cap = std::min(floor_energy(h.xmin), floor_energy(h.xmax));
    const double e_span = e_cap - e_floor;
    if (!(e_span > 0.0))
        throw DomainError("bohr_sommerfeld_levels: no potential well inside the domain");

    const double quad_tol = 1e-13;
    double last_action = -std::numeric_limits<double>::infinity();
    double last_e = -std::numeric_limits<double>::infinity();
    auto round_trip_action = [&](double E) -> std::optional<double> {
        const auto ext = detail::well_extent(h, E, x_best);
        if (!ext) return std::nullopt;  // well no longer contained: treat as "too high"
        const double J = 2.0 * action_integral(h, E, ext->first, ext->second, quad_tol);
        if (E > last_e && J < last_action - 1e-9 * std::max(1.0, std::abs(last_action)))
            throw SolverError("bohr_sommerfeld_levels: action not monotone in E near E = " +
                              std::to_string(E));
        if (E > last_e) {
            last_e = E;
            last_action = J;
        }
        return J;
    };

    const double hbar = h.units.hbar;
    double e_lo = e_floor + 1e-13 * std::max(1.0, std::abs(e_floor));
    double j_lo = 0.0;
    {
        const auto j0 = round_trip_action(e_lo);
        if (j0) j_lo = *j0;
    }

    for (int n = n_min; n <= n_max; ++n) {
        const double target = 2.0 * M_PI * hbar * (n + 0.5);
        if (j_lo > target) {
            // The level sits below our current lower edge; restart from the floor.
            e_lo = e_floor + 1e-13 * std::max(1.0, std::abs(e_floor));
            const auto j0 = round_trip_action(e_lo);
            j_lo = j0 ? *j0 : 0.0;
            if (j_lo > target) continue;  // well too stiff to resolve below this n
        }

        // Grow the upper edge toward e_cap until the target action is bracketed.
        double e_hi = std::numeric_limits<double>::quiet_NaN();
        double j_hi = 0.0;
        bool bracketed = false;
        for (int j = 1; j <= 60; ++j) {
            const double cand = e_cap - e_span * std::pow(2.0, -j);
            if (cand <= e_lo) continue;
            const auto jc = round_trip_action(cand);
            if (!jc) continue;  // not contained; try closer to the cap
            if (*jc >= target) {
                e_hi = cand;
                j_hi = *jc;
                bracketed = true;
                break;
            }
            e_lo = cand;
            j_lo = *jc;
        }
        if (!bracketed) return levels;  // domain-contained well supports no more levels

        double lo = e_lo, hi = e_hi, fhi = j_hi - target;
        double e_n = 0.5 * (lo + hi);
        double res = 0.0;
        for (int it = 0; it < 200; ++it) {
            e_n = 0.5 * (lo + hi);
            const auto jm = round_trip_action(e_n);
            if (!jm) {
                hi = e_n;
                continue;
            }
            res = *jm - target;
            if (res == 0.0) break;
            if ((res > 0.0) == (fhi > 0.0)) {
                hi = e_n;
                fhi = res;
            } else {
                lo = e_n;
            }
            if (std::abs(res) <= 1e-10 * std::max(1.0, std::abs(target))) break;
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(e_n)))
                break;
        }
        if (std::abs(res) > 1e-8 * std::max(1.0, std::abs(target)))
            throw SolverError("bohr_sommerfeld_levels: quantization residual " +
                              std::to_string(res) + " did not converge for n = " +
                              std::to_string(n));
        levels.push_back({n, e_n, res});
        e_lo = e_n;
        j_lo = target + res;
    }

    for (std::size_t i = 1; i < levels.size(); ++i)
        if (!(levels[i].energy > levels[i - 1].energy))
            throw SolverError("bohr_sommerfeld_levels: levels not strictly increasing");
    return levels;
}

}  // namespace fwc::wkb
