#pragma once

#include <Eigen/Dense>
#include <complex>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "fwc/classical.hpp"
#include "fwc/errors.hpp"
#include "fwc/harness.hpp"
#include "fwc/model.hpp"

namespace fwc::config {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

namespace detail {
inline const json& require_key(const json& j, const std::string& key,
                               const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
    return *it;
}

template <class T>
T get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<T>();
}

inline std::vector<double> get_number_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(get_number<double>(v, where));
    return out;
}
}  // namespace detail

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// PotentialSpec <-> JSON: {"type": "zero"|"constant"|"linear"|"harmonic"|
// "polynomial"|"tabulated", ...form-specific fields...}
// ---------------------------------------------------------------------------

inline PotentialSpec parse_potential(const json& j, const std::string& where = "potential") {
    if (j.is_null()) return PotentialSpec::zero();
    if (!j.is_object()) throw ConfigError(where + ": expected an object with a 'type' key");
    const std::string type = detail::require_key(j, "type", where).get<std::string>();
    if (type == "zero") return PotentialSpec::zero();
    if (type == "constant")
        return PotentialSpec::constant(
            detail::get_number<double>(detail::require_key(j, "value", where), where));
    if (type == "linear")
        return PotentialSpec::linear(
            detail::get_number<double>(detail::require_key(j, "slope", where), where));
    if (type == "harmonic")
        return PotentialSpec::harmonic(
            detail::get_number<double>(detail::require_key(j, "k", where), where),
            get_or<double>(j, "x0", 0.0));
    if (type == "polynomial")
        return PotentialSpec::polynomial(
            detail::get_number_array(detail::require_key(j, "coeffs", where), where));
    if (type == "tabulated") {
        auto xs = detail::get_number_array(detail::require_key(j, "x", where), where);
        auto vs = detail::get_number_array(detail::require_key(j, "values", where), where);
        try {
            return PotentialSpec::tabulated(std::move(xs), std::move(vs));
        } catch (const Error& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    throw ConfigError(where + ": unknown potential type '" + type + "'");
}

inline json potential_to_json(const PotentialSpec& p) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PotentialSpec::Zero>) {
                return {{"type", "zero"}};
            } else if constexpr (std::is_same_v<T, PotentialSpec::Constant>) {
                return {{"type", "constant"}, {"value", f.value}};
            } else if constexpr (std::is_same_v<T, PotentialSpec::Linear>) {
                return {{"type", "linear"}, {"slope", f.slope}};
            } else if constexpr (std::is_same_v<T, PotentialSpec::Harmonic>) {
                return {{"type", "harmonic"}, {"k", f.k}, {"x0", f.x0}};
            } else if constexpr (std::is_same_v<T, PotentialSpec::PolynomialInX>) {
                return {{"type", "polynomial"}, {"coeffs", f.coeffs}};
            } else {
                return {{"type", "tabulated"}, {"x", f.xs}, {"values", f.values}};
            }
        },
        p.form());
}

// V(x,p) = sum of terms [{"k": power index, "coeff": potential}]
inline MomentumPotentialSpec parse_momentum_potential(const json& j,
                                                      const std::string& where = "V") {
    MomentumPotentialSpec v;
    if (j.is_null()) return v;
    if (!j.is_array()) throw ConfigError(where + ": expected an array of {k, coeff} terms");
    for (const auto& term : j) {
        const auto& jk = detail::require_key(term, "k", where);
        if (!jk.is_number_unsigned())
            throw ConfigError(where + ": power index k must be a nonnegative integer");
        v.add_term(jk.get<unsigned>(),
                   parse_potential(detail::require_key(term, "coeff", where), where + ".coeff"));
    }
    return v;
}

inline json momentum_potential_to_json(const MomentumPotentialSpec& v) {
    json arr = json::array();
    for (const auto& t : v.terms())
        arr.push_back({{"k", t.k}, {"coeff", potential_to_json(t.coeff)}});
    return arr;
}

// ---------------------------------------------------------------------------
// HamiltonianSpec <-> JSON: {mass, hbar, c, U, V, domain}. hbar/c may be
// omitted when `fallback_units` (e.g. a config's units section) supplies them.
// ---------------------------------------------------------------------------

inline HamiltonianSpec parse_hamiltonian(const json& j, const UnitSystem& fallback_units = {}) {
    if (!j.is_object()) throw ConfigError("hamiltonian: expected an object");
    HamiltonianSpec h;
    h.mass = get_or<double>(j, "mass", 1.0);
    h.units.hbar = get_or<double>(j, "hbar", fallback_units.hbar);
    h.units.c = get_or<double>(j, "c", fallback_units.c);
    h.U = parse_potential(j.contains("U") ? j.at("U") : json(nullptr), "hamiltonian.U");
    h.V = parse_momentum_potential(j.contains("V") ? j.at("V") : json(nullptr),
                                   "hamiltonian.V");
    if (j.contains("domain")) {
        const auto dom = detail::get_number_array(j.at("domain"), "hamiltonian.domain");
        if (dom.size() != 2)
            throw ConfigError("hamiltonian.domain: expected [xmin, xmax]");
        h.xmin = dom[0];
        h.xmax = dom[1];
    }
    h.validate();
    return h;
}

inline json hamiltonian_to_json(const HamiltonianSpec& h) {
    return {{"mass", h.mass},         {"hbar", h.units.hbar},
            {"c", h.units.c},         {"U", potential_to_json(h.U)},
            {"V", momentum_potential_to_json(h.V)},
            {"domain", json::array({h.xmin, h.xmax})}};
}

// grid: {"n": power of two, "xmin": ..., "xmax": ...}; bounds default to the
// hamiltonian domain.
inline Grid parse_grid(const json& j, const HamiltonianSpec& h) {
    if (!j.is_object()) throw ConfigError("grid: expected an object");
    const auto& jn = detail::require_key(j, "n", "grid");
    if (!jn.is_number_integer()) throw ConfigError("grid.n: expected an integer");
    return make_grid(get_or<double>(j, "xmin", h.xmin), get_or<double>(j, "xmax", h.xmax),
                     jn.get<int>());
}

inline harness::PacketSpec parse_packet(const json& j) {
    if (!j.is_object()) throw ConfigError("packet: expected an object");
    harness::PacketSpec p;
    p.x0 = get_or<double>(j, "x0", 0.0);
    p.p0 = get_or<double>(j, "p0", 0.0);
    p.width = detail::get_number<double>(detail::require_key(j, "width", "packet"),
                                         "packet.width");
    return p;
}

// omega: {"type": "constant", "value": [wx, wy, wz]} or
//        {"type": "tabulated", "times": [...], "values": [[wx,wy,wz], ...]}
inline OmegaSpec parse_omega(const json& j) {
    if (!j.is_object()) throw ConfigError("omega: expected an object with a 'type' key");
    const std::string type = detail::require_key(j, "type", "omega").get<std::string>();
    auto to_vec3 = [](const json& a, const std::string& where) {
        const auto v = detail::get_number_array(a, where);
        if (v.size() != 3) throw ConfigError(where + ": expected 3 components");
        return Eigen::Vector3d(v[0], v[1], v[2]);
    };
    if (type == "constant")
        return OmegaSpec::constant(to_vec3(detail::require_key(j, "value", "omega"),
                                           "omega.value"));
    if (type == "tabulated") {
        const auto times =
            detail::get_number_array(detail::require_key(j, "times", "omega"), "omega.times");
        const auto& jv = detail::require_key(j, "values", "omega");
        if (!jv.is_array()) throw ConfigError("omega.values: expected an array of 3-vectors");
        std::vector<Eigen::Vector3d> values;
        values.reserve(jv.size());
        for (const auto& row : jv) values.push_back(to_vec3(row, "omega.values"));
        try {
            return OmegaSpec::tabulated(times, std::move(values));
        } catch (const Error& e) {
            throw ConfigError(std::string("omega: ") + e.what());
        }
    }
    throw ConfigError("omega: unknown type '" + type + "'");
}

// Spin states serialize as interleaved (re, im) pairs: [re0, im0, re1, im1, ...].
inline Eigen::VectorXcd parse_spin_state(const json& j, const std::string& where = "chi0") {
    const auto flat = detail::get_number_array(j, where);
    if (flat.empty() || flat.size() % 2 != 0)
        throw ConfigError(where + ": expected an even-length array of interleaved (re, im)");
    Eigen::VectorXcd chi(static_cast<Eigen::Index>(flat.size() / 2));
    for (Eigen::Index i = 0; i < chi.size(); ++i)
        chi(i) = std::complex<double>(flat[2 * static_cast<std::size_t>(i)],
                                      flat[2 * static_cast<std::size_t>(i) + 1]);
    return chi;
}

inline json spin_state_to_json(const Eigen::VectorXcd& chi) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < chi.size(); ++i) {
        arr.push_back(chi(i).real());
        arr.push_back(chi(i).imag());
    }
    return arr;
}

inline UnitSystem parse_units(const json& root) {
    UnitSystem u;
    if (root.contains("units")) {
        const json& j = root.at("units");
        if (!j.is_object()) throw ConfigError("units: expected an object");
        u.hbar = get_or<double>(j, "hbar", 1.0);
        u.c = get_or<double>(j, "c", 1.0);
    }
    u.validate();
    return u;
}

}  // namespace fwc::config
