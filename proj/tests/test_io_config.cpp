#include <doctest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <string>

#include "cemech/config.hpp"
#include "cemech/io.hpp"
#include "support.hpp"

using namespace cemech;
using namespace testing;

namespace {

std::size_t parse_error_line(const std::string& text)
{
    try {
        io::parse_csv(text, "t.csv");
    } catch (const io::ParseError& e) {
        return e.line();
    }
    return static_cast<std::size_t>(-1);
}

std::string config_error(const std::string& text)
{
    try {
        parse_config(text, "c.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}

TEST_SUITE("io") {

TEST_CASE("csv parsing")
{
    const io::Table t = io::parse_csv("# comment\nfrequency_hz, psd_quanta\n\n1.0,2.0\n2.0 , 3.5\n", "t.csv");
    REQUIRE(t.columns.size() == 2);
    CHECK(t.columns[1] == "psd_quanta");
    CHECK(t.rows.size() == 2);
    CHECK(t.line_numbers[0] == 4);
    CHECK(t.line_numbers[1] == 5);
    CHECK(t.column("psd_quanta")[1] == 3.5);
    CHECK(t.first_of({"frequency_abs_hz", "frequency_hz"}) == std::optional<std::string>("frequency_hz"));
    CHECK_THROWS_AS(t.column("missing"), io::ParseError);
}

TEST_CASE("csv errors carry the line number")
{
    CHECK(parse_error_line("a,b\n1,2\n3,x\n") == 3);
    CHECK(parse_error_line("a,b\n1,2\n3\n") == 3);
    CHECK(parse_error_line("a,b\n# note\n1,2,3\n") == 3);
    CHECK(parse_error_line("a,a\n1,2\n") == 1);
    CHECK(parse_error_line("") == 0);
    try {
        io::parse_csv("a,b\n1,nan-ish\n", "data/x.csv");
        FAIL("no error");
    } catch (const io::ParseError& e) {
        CHECK(std::string(e.what()).find("data/x.csv:2") == 0);
    }
}

TEST_CASE("spectrum csv round trip")
{
    const auto dir = scratch("io_spectrum");
    SpectrumTrace s;
    s.frequencies_hz = {1.0, 2.0, 3.0};
    s.values = {0.1, 0.7, 1e-30};
    io::write_spectrum_csv(dir / "s.csv", s);
    const SpectrumTrace r = io::read_spectrum_csv(dir / "s.csv");
    CHECK(r.frequencies_hz == s.frequencies_hz);
    CHECK(r.values == s.values);

    io::write_file(dir / "bad.csv", "frequency_hz,psd_quanta\n1,1\n3,1\n2,1\n");
    try {
        io::read_spectrum_csv(dir / "bad.csv");
        FAIL("no error");
    } catch (const io::ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("time trace round trips")
{
    const auto dir = scratch("io_trace");
    TimeTrace t;
    t.sample_rate = 12.5;
    t.t0 = -0.4;
    for (int i = 0; i < 257; ++i) {
        t.samples.push_back(std::polar(1.0 + i * 1e-3, 0.1 * i));
    }
    io::write_timetrace_binary(dir / "t.bin", t);
    const TimeTrace b = io::read_timetrace(dir / "t.bin");
    CHECK(b.samples == t.samples);
    CHECK(b.sample_rate == t.sample_rate);
    CHECK(b.t0 == t.t0);
    CHECK(b.kind == SampleKind::complex_amplitude);

    io::write_timetrace_csv(dir / "t.csv", t);
    const TimeTrace c = io::read_timetrace(dir / "t.csv");
    REQUIRE(c.size() == t.size());
    CHECK(rel(c.sample_rate, t.sample_rate) < 1e-12);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(c.samples[i] - t.samples[i]) < 1e-15);
    }

    // Truncated and foreign files are rejected.
    const std::string bytes = io::read_file(dir / "t.bin");
    io::write_file(dir / "short.bin", bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(io::read_timetrace(dir / "short.bin"), io::ParseError);
    io::write_file(dir / "foreign.bin", "NOTATRACE-----------------------------------");
    CHECK_THROWS_AS(io::read_timetrace(dir / "foreign.bin"), io::ParseError);
}

TEST_CASE("sha256")
{
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fit report json round trip")
{
    FitReport f;
    f.names = {"a", "b"};
    f.values = {1.5, -2.0};
    f.std_errors = {0.1, 0.2};
    f.covariance = Eigen::MatrixXd{{0.01, 0.001}, {0.001, 0.04}};
    f.converged = true;
    f.stop_reason = "gradient";
    f.n_points = 10;
    f.dof = 8;
    f.warnings = {"w"};
    const FitReport g = io::fit_report_from_json(io::to_json(f));
    CHECK(g.names == f.names);
    CHECK(g.values == f.values);
    CHECK(g.std_errors == f.std_errors);
    CHECK(g.covariance == f.covariance);
    CHECK(g.converged);
    CHECK(g.warnings == f.warnings);
}

}

TEST_SUITE("config") {

TEST_CASE("units are converted at the boundary")
{
    const PipelineConfig c = parse_config("[mechanics]\nomega_m_hz = 1.486e6\ngamma_m_hz = 1e-3\nmass_kg = 15e-12\n"
                                          "[cavity]\nkappa_hz = 226e3\neta = 0.81\n"
                                          "[drive]\nsource_power_dbm = 10\nattenuation_db = 66.5\n"
                                          "[pump]\ngamma_m_hz = 1e-3\np0_dbm = -38.7\n");
    REQUIRE(c.mechanics);
    CHECK(rel(c.mechanics->omega_m, omega_m) < 1e-15);
    CHECK(rel(*c.mechanics->mass, 15e-12) < 1e-15);
    REQUIRE(c.cavity);
    CHECK(rel(c.cavity->kappa_ex, 0.81 * kappa) < 1e-15);
    CHECK(std::isnan(c.cavity->omega_c));
    REQUIRE(c.drive);
    CHECK(rel(c.drive->power_at_device, dbm_to_watts(-56.5)) < 1e-12);
    REQUIRE(c.pump);
    CHECK(rel(c.pump->p0, dbm_to_watts(-38.7)) < 1e-12);
    CHECK(c.raw.at("mechanics.mass_kg") == "15e-12");
}

TEST_CASE("unknown keys and sections are errors")
{
    CHECK(config_error("[mechanics]\nomega_m_hz = 1\ngamma_m_hz = 1\nomega_m = 3\n").find("omega_m") !=
          std::string::npos);
    CHECK(config_error("[mechanic]\nomega_m_hz = 1\n").find("unknown section") != std::string::npos);
    CHECK(config_error("[mechanics]\nomega_m_hz = fast\ngamma_m_hz = 1\n").find("omega_m_hz") != std::string::npos);
    CHECK(config_error("[mechanics]\nomega_m_hz = 1\n").find("gamma_m_hz") != std::string::npos);
    CHECK(config_error("[cavity]\nkappa_hz = 1\nkappa_ex_hz = 2\n") != "");
    CHECK(config_error("[trajectory]\ngamma_eff_hz = 1\noccupation = 1\nsample_rate_hz = 1\nduration_s = 1\n"
                       "overlap = 1\n") != "");
    CHECK(config_error("[fit]\nweighting = sideways\n").find("weighting") != std::string::npos);
    CHECK(config_error("[mechanics\nomega_m_hz = 1\n").find("c.ini") == 0);
}

TEST_CASE("shipped configs parse")
{
    for (const char* name : {"device.ini", "simulate.ini"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(std::filesystem::path(CEMECH_SOURCE_DIR) / "configs" / name));
    }
    const PipelineConfig p = load_config(std::filesystem::path(CEMECH_SOURCE_DIR) / "configs" / "device.ini");
    REQUIRE(p.circuit);
    CHECK(rel(p.circuit->inductance, 3.517e-9) < 2e-4);
    CHECK(!load_config(std::filesystem::path(CEMECH_SOURCE_DIR) / "configs" / "device.ini").raw.empty());
    CHECK_THROWS_AS(load_config("/nonexistent/cemech.ini"), ConfigError);
}

}
