#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fwc/config.hpp"
#include "fwc/io.hpp"

using namespace fwc;
using namespace fwc::config;
using Catch::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("potential specs round-trip through json", "[config]") {
    const std::vector<PotentialSpec> catalog = {
        PotentialSpec::zero(),
        PotentialSpec::constant(0.7),
        PotentialSpec::linear(-0.4),
        PotentialSpec::harmonic(2.0, 0.3),
        PotentialSpec::polynomial({1.0, 0.0, -0.5, 0.25}),
        PotentialSpec::tabulated({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 0.1, -0.2}),
    };
    for (const auto& p : catalog) {
        const PotentialSpec back = parse_potential(potential_to_json(p));
        // every catalog form is defined on [0.1, 2.6]
        for (double x : {0.1, 0.9, 1.7, 2.6})
            CHECK(back.value(x) == Approx(p.value(x)).margin(1e-14));
    }
}

TEST_CASE("hamiltonian spec round-trips through json", "[config]") {
    HamiltonianSpec h;
    h.mass = 2.0;
    h.units.hbar = 0.5;
    h.units.c = 3.0;
    h.U = PotentialSpec::harmonic(1.5, -0.2);
    MomentumPotentialSpec v;
    v.add_term(1, PotentialSpec::constant(0.3));
    v.add_term(2, PotentialSpec::harmonic(0.1, 0.0));
    h.V = v;
    h.xmin = -4.0;
    h.xmax = 6.0;

    const HamiltonianSpec back = parse_hamiltonian(hamiltonian_to_json(h));
    CHECK(back.mass == 2.0);
    CHECK(back.units.hbar == 0.5);
    CHECK(back.units.c == 3.0);
    CHECK(back.xmin == -4.0);
    CHECK(back.xmax == 6.0);
    for (double x : {-1.0, 0.0, 2.0})
        for (double p : {0.0, 1.0}) {
            CHECK(back.U.value(x) == Approx(h.U.value(x)).margin(1e-15));
            CHECK(back.V.value(x, p) == Approx(h.V.value(x, p)).margin(1e-15));
        }
}

TEST_CASE("hamiltonian parsing defaults and failures", "[config]") {
    const json minimal = json::object();
    const HamiltonianSpec h = parse_hamiltonian(minimal);
    CHECK(h.mass == 1.0);
    CHECK(h.units.hbar == 1.0);
    CHECK(h.units.c == 1.0);
    CHECK(h.U.is_identically_zero());
    CHECK(h.V.empty());

    UnitSystem fallback;
    fallback.hbar = 0.25;
    fallback.c = 10.0;
    const HamiltonianSpec hf = parse_hamiltonian(minimal, fallback);
    CHECK(hf.units.hbar == 0.25);
    CHECK(hf.units.c == 10.0);

    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"mass": -1})")), ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"domain": [2, -2]})")), ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"domain": [0]})")), ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"U": {"type": "nope"}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"U": {"type": "harmonic"}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"V": [{"k": -1, "coeff": null}]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_hamiltonian(json::parse(R"({"V": {"k": 1}})")), ConfigError);
}

TEST_CASE("grid and packet parsing", "[config]") {
    HamiltonianSpec h;
    h.xmin = -3.0;
    h.xmax = 3.0;
    const Grid g = parse_grid(json::parse(R"({"n": 128})"), h);
    CHECK(g.n == 128);
    CHECK(g.xmin == -3.0);
    CHECK(g.xmax == 3.0);

    const Grid g2 = parse_grid(json::parse(R"({"n": 64, "xmin": -1, "xmax": 1})"), h);
    CHECK(g2.xmin == -1.0);
    CHECK(g2.dx == Approx(2.0 / 64.0));

    CHECK_THROWS_AS(parse_grid(json::parse(R"({"n": 100})"), h), ConfigError);  // not 2^k
    CHECK_THROWS_AS(parse_grid(json::parse(R"({"n": 4})"), h), ConfigError);    // too small
    CHECK_THROWS_AS(parse_grid(json::parse(R"({"n": 64.5})"), h), ConfigError);
    CHECK_THROWS_AS(parse_grid(json::parse(R"({})"), h), ConfigError);

    const auto packet = parse_packet(json::parse(R"({"x0": 1.5, "p0": -0.5, "width": 0.2})"));
    CHECK(packet.x0 == 1.5);
    CHECK(packet.p0 == -0.5);
    CHECK(packet.width == 0.2);
    CHECK_THROWS_AS(parse_packet(json::parse(R"({"x0": 1})")), ConfigError);
}

TEST_CASE("omega parsing and round trip", "[config]") {
    const auto con = parse_omega(json::parse(R"({"type": "constant", "value": [0, 0, 2]})"));
    CHECK(con.is_constant());
    CHECK(con.value(100.0)(2) == 2.0);

    const auto tab = parse_omega(json::parse(
        R"({"type": "tabulated", "times": [0, 1, 2], "values": [[1,0,0],[0,1,0],[0,0,1]]})"));
    CHECK_FALSE(tab.is_constant());
    CHECK(tab.value(0.5)(0) == Approx(0.5));
    CHECK(tab.covers(0.0, 2.0));

    CHECK_THROWS_AS(parse_omega(json::parse(R"({"type": "constant", "value": [1, 2]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_omega(json::parse(R"({"type": "wavelet"})")), ConfigError);
    CHECK_THROWS_AS(
        parse_omega(json::parse(R"({"type": "tabulated", "times": [0], "values": [[1,0,0]]})")),
        ConfigError);
}

TEST_CASE("spin states use interleaved re/im pairs", "[config]") {
    const auto chi = parse_spin_state(json::parse("[1, 0, 0, 1]"));
    REQUIRE(chi.size() == 2);
    CHECK(chi(0) == std::complex<double>(1, 0));
    CHECK(chi(1) == std::complex<double>(0, 1));

    const json back = spin_state_to_json(chi);
    const auto again = parse_spin_state(back);
    CHECK((again - chi).norm() == 0.0);

    CHECK_THROWS_AS(parse_spin_state(json::parse("[1, 0, 0]")), ConfigError);
    CHECK_THROWS_AS(parse_spin_state(json::parse("[]")), ConfigError);
    CHECK_THROWS_AS(parse_spin_state(json::parse(R"("chi")")), ConfigError);
}

TEST_CASE("units section parses with defaults", "[config]") {
    CHECK(parse_units(json::object()).hbar == 1.0);
    const auto u = parse_units(json::parse(R"({"units": {"hbar": 0.01, "c": 137}})"));
    CHECK(u.hbar == 0.01);
    CHECK(u.c == 137.0);
    CHECK_THROWS_AS(parse_units(json::parse(R"({"units": {"hbar": -1}})")), ConfigError);
}

TEST_CASE("config file loading reports failures as config errors", "[config]") {
    CHECK_THROWS_AS(load_json_file("/nonexistent/path.json"), ConfigError);
    TempFile bad("fwc_bad_config.json");
    std::ofstream(bad.path) << "{ not json";
    CHECK_THROWS_AS(load_json_file(bad.path), ConfigError);
}

TEST_CASE("csv writer emits a hash header and full-precision rows", "[config]") {
    TempFile csv("fwc_test_out.csv");
    {
        io::CsvWriter w(csv.path, {"t", "x", "p"});
        w.row({0.0, 1.0 / 3.0, -2.5});
        w.row({0.1, 2.0, 3.0});
        w.close();
    }
    const std::string text = slurp(csv.path);
    CHECK(text.substr(0, 8) == "# t,x,p\n");
    CHECK(text.find("0.33333333333333331") != std::string::npos);

    // Deterministic: a second identical run produces identical bytes.
    TempFile csv2("fwc_test_out2.csv");
    {
        io::CsvWriter w(csv2.path, {"t", "x", "p"});
        w.row({0.0, 1.0 / 3.0, -2.5});
        w.row({0.1, 2.0, 3.0});
        w.close();
    }
    CHECK(slurp(csv2.path) == text);

    io::CsvWriter w3(csv.path, {"a", "b"});
    CHECK_THROWS_AS(w3.row({1.0}), ConfigError);
    CHECK_THROWS_AS(io::CsvWriter("/nonexistent/dir/out.csv", {"a"}), ConfigError);
    CHECK_THROWS_AS(io::CsvWriter(csv.path, {}), ConfigError);
}
