#include <doctest.h>

#include <cmath>
#include <limits>

#include "cemech/core.hpp"
#include "support.hpp"

using namespace cemech;
using namespace testing;

TEST_SUITE("core") {

TEST_CASE("dBm conversions")
{
    CHECK(rel(dbm_to_watts(0.0), 1e-3) < 1e-14);
    CHECK(rel(dbm_to_watts(-56.5), 2.2387e-9) < 1e-4);
    CHECK(attenuate_dbm(10.0, 66.5) == doctest::Approx(-56.5));
    CHECK_THROWS(dbm_to_watts(std::numeric_limits<double>::infinity()));
    CHECK_THROWS(dbm_to_watts(std::nan("")));
    CHECK_THROWS(watts_to_dbm(-1.0));
}

TEST_CASE("dBm round trip")
{
    for (double p = -150.0; p <= 40.0; p += 0.37) {
        CHECK(rel(watts_to_dbm(dbm_to_watts(p)), p == 0.0 ? 1.0 : p) < 1e-12);
    }
    for (double w : logspace(1e-20, 10.0, 50)) {
        CHECK(rel(dbm_to_watts(watts_to_dbm(w)), w) < 1e-12);
    }
}

TEST_CASE("angular conversion round trip")
{
    for (double f : logspace(1e-6, 1e10, 40)) {
        CHECK(rel(rad_to_hz(hz_to_rad(f)), f) < 1e-15);
    }
}

TEST_CASE("thermal occupation")
{
    const double hb = PhysicalConstants::hbar;
    const double kb = PhysicalConstants::k_B;
    CHECK(thermal_occupation(0.0, omega_m) == 0.0);

    // hbar w = k T ln 2 gives exactly one quantum.
    const double t = hb * omega_m / (kb * std::log(2.0));
    CHECK(thermal_occupation(t, omega_m) == doctest::Approx(1.0).epsilon(1e-12));

    const double oracle = 1.0 / std::expm1(hb * omega_m / (kb * t_bath));
    CHECK(thermal_occupation(t_bath, omega_m) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(thermal_occupation(t_bath, omega_m) - 1121.0) < 1.0);

    CHECK_THROWS(thermal_occupation(0.1, 0.0));
    CHECK_THROWS(thermal_occupation(0.1, -1.0));
    CHECK_THROWS(thermal_occupation(-0.1, omega_m));
}

TEST_CASE("thermal occupation high temperature limit")
{
    const double hb = PhysicalConstants::hbar;
    const double kb = PhysicalConstants::k_B;
    for (double t : logspace(0.01, 10.0, 30)) {
        const double n = thermal_occupation(t, omega_m);
        if (n > 100.0) {
            CHECK(rel(n, kb * t / (hb * omega_m) - 0.5) < 1e-3);
        }
    }
}

TEST_CASE("thermal occupation monotonicity")
{
    double prev = -1.0;
    for (double t : logspace(1e-3, 10.0, 60)) {
        const double n = thermal_occupation(t, omega_m);
        CHECK(n > prev);
        prev = n;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double w : logspace(1e3, 1e11, 60)) {
        const double n = thermal_occupation(t_bath, w);
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("coherence time")
{
    const MechanicalMode mode{omega_m, gamma_m, std::nullopt};
    const CoherenceTime ct = coherence_time(mode, {t_bath});
    const double n = 1.0 / std::expm1(PhysicalConstants::hbar * omega_m / (PhysicalConstants::k_B * t_bath));
    CHECK(!ct.infinite);
    CHECK(ct.seconds == doctest::Approx(1.0 / (n * gamma_m)).epsilon(1e-12));
    CHECK(ct.seconds == doctest::Approx(0.142).epsilon(0.005));
    CHECK(ct.estimates_agree);
    CHECK(rel(ct.high_temperature, ct.seconds) < 1e-3);

    const CoherenceTime doubled = coherence_time({omega_m, 2 * gamma_m, std::nullopt}, {t_bath});
    CHECK(doubled.seconds == doctest::Approx(ct.seconds / 2).epsilon(1e-12));

    const CoherenceTime hot = coherence_time(mode, {0.160});
    CHECK(hot.seconds == doctest::Approx(0.071).epsilon(0.01));

    const CoherenceTime cold = coherence_time(mode, {0.0});
    CHECK(cold.infinite);
}

TEST_CASE("quality factor")
{
    CHECK(quality_factor({omega_m, gamma_m, std::nullopt}) == doctest::Approx(1.486e9));
    CHECK(quality_factor({hz_to_rad(1.487e6), hz_to_rad(2.13e-3), std::nullopt}) ==
          doctest::Approx(6.98e8).epsilon(1e-3));
    CHECK(quality_factor({1.0, 1.0, std::nullopt}) == 1.0);
}

TEST_CASE("type invariants")
{
    CHECK_THROWS(CavityParams{omega_c, kappa, 1.1 * kappa}.validate());
    CHECK_THROWS(CavityParams{omega_c, -kappa, kappa_ex}.validate());
    CHECK_NOTHROW(CavityParams{omega_c, kappa, kappa_ex}.validate());
    CHECK(CavityParams{omega_c, kappa, kappa_ex}.eta() == doctest::Approx(183.0 / 226.0));
    CHECK_THROWS(MechanicalMode{0.0, gamma_m, std::nullopt}.validate());
    CHECK_THROWS(MechanicalMode{omega_m, 0.0, std::nullopt}.validate());
    CHECK_THROWS(Drive{-1.0, 0.0, 0.0}.validate());
    CHECK_THROWS(Drive{1.0, 0.0, -3.0}.validate());
    CHECK_THROWS(Environment{-0.1}.validate());
}

}
