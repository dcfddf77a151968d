#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "cemech/estimate.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace cemech;
using namespace testing;

namespace {

double mean(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev(const std::vector<double>& v)
{
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SpectrumTrace lorentz_trace(std::span<const double> f, double c, double w, double a, double o)
{
    SpectrumTrace t;
    for (double x : f) {
        t.frequencies_hz.push_back(x);
        t.values.push_back(o + a / std::numbers::pi * (w / 2) / ((x - c) * (x - c) + w * w / 4));
    }
    return t;
}

TimeTrace exp_trace(double amp, double gamma, double fs, std::size_t n, double t0 = 0.0)
{
    TimeTrace e;
    e.kind = SampleKind::real;
    e.sample_rate = fs;
    e.t0 = t0;
    for (std::size_t i = 0; i < n; ++i) {
        e.samples.emplace_back(amp * std::exp(-gamma * static_cast<double>(i) / fs), 0.0);
    }
    return e;
}

}

TEST_SUITE("estimate") {

TEST_CASE("engine: exact data")
{
    const auto x = linspace(0.0, 5.0, 30);
    std::vector<double> y;
    for (double v : x) {
        y.push_back(1.7 * std::sin(2.1 * v + 0.4));
    }
    auto model = [](double v, std::span<const double> p) { return p[0] * std::sin(p[1] * v + p[2]); };
    const FitReport f = nlls_fit(model, x, y, {}, {"a", "w", "phi"}, {1.5, 2.0, 0.3});
    REQUIRE(f.converged);
    CHECK(rel(f.value("a"), 1.7) < 1e-8);
    CHECK(rel(f.value("w"), 2.1) < 1e-8);
    CHECK(rel(f.value("phi"), 0.4) < 1e-8);
    CHECK(f.n_points == 30);
    CHECK(f.dof == 27);
    CHECK(f.iterations > 0);
    CHECK(!f.stop_reason.empty());
}

TEST_CASE("engine: preconditions")
{
    auto model = [](double v, std::span<const double> p) { return p[0] + p[1] * v; };
    const std::vector<double> x{1.0, 2.0}, y{1.0, 2.0};
    CHECK_THROWS(nlls_fit(model, x, y, {}, {"a", "b"}, {0.0, 0.0}));
    const std::vector<double> x3{1.0, 2.0, 3.0}, y2{1.0, 2.0};
    CHECK_THROWS(nlls_fit(model, x3, y2, {}, {"a", "b"}, {0.0, 0.0}));
    const std::vector<double> y3{1.0, 2.0, 3.0}, bad_sigma{1.0, 0.0, 1.0};
    CHECK_THROWS(nlls_fit(model, x3, y3, bad_sigma, {"a", "b"}, {0.0, 0.0}));
}

TEST_CASE("engine: singular Jacobian is reported")
{
    const auto x = linspace(0.0, 1.0, 10);
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * v);
    }
    auto model = [](double v, std::span<const double> p) { return (p[0] + p[1]) * v; };
    const FitReport f = nlls_fit(model, x, y, {}, {"a", "b"}, {1.0, 1.0});
    CHECK(!f.converged);
    REQUIRE(!f.diagnostics.empty());
    const std::string all = std::accumulate(f.diagnostics.begin(), f.diagnostics.end(), std::string());
    CHECK(all.find('a') != std::string::npos);
    CHECK(all.find('b') != std::string::npos);
}

TEST_CASE("engine: converged reports are consistent")
{
    for (const auto& sc : fit_scenarios()) {
        CAPTURE(sc.name);
        const Trial t = sc.run(0.03, 1);
        REQUIRE(t.fit.converged);
        CHECK(!t.fit.stop_reason.empty());
        CHECK(t.fit.values.size() == t.fit.names.size());
        CHECK(t.fit.std_errors.size() == t.fit.names.size());
        CHECK(t.fit.covariance.rows() == static_cast<long>(t.fit.names.size()));
        for (std::size_t i = 0; i < t.fit.names.size(); ++i) {
            CHECK(t.fit.std_errors[i] >= 0.0);
            const double var = t.fit.covariance(static_cast<long>(i), static_cast<long>(i));
            CHECK(t.fit.std_errors[i] == doctest::Approx(std::sqrt(var)).scale(0.0));
        }
    }
}

TEST_CASE("engine: reparametrize and intervals")
{
    FitReport r;
    r.names = {"a", "b"};
    r.values = {2.0, 3.0};
    r.std_errors = {0.1, 0.2};
    r.covariance = Eigen::MatrixXd::Zero(2, 2);
    r.covariance(0, 0) = 0.01;
    r.covariance(1, 1) = 0.04;
    r.dof = 5;
    r.converged = true;
    const FitReport s = reparametrize(r, {"sum", "prod"}, [](std::span<const double> p) {
        return std::vector<double>{p[0] + p[1], p[0] * p[1]};
    });
    CHECK(s.value("sum") == doctest::Approx(5.0));
    CHECK(s.error("sum") == doctest::Approx(std::sqrt(0.05)).epsilon(1e-6));
    CHECK(s.error("prod") == doctest::Approx(std::sqrt(9 * 0.01 + 4 * 0.04)).epsilon(1e-6));
    CHECK(s.dof == 5);

    const Interval ci = confidence_interval(r, "a");
    CHECK(ci.upper - 2.0 == doctest::Approx(2.5706 * 0.1).epsilon(1e-4));
    CHECK(ci.contains(2.2));
    CHECK(!ci.contains(2.3));
    CHECK_THROWS(r.index("missing"));
}

TEST_CASE("zero-noise round trip for every fit")
{
    for (const auto& sc : fit_scenarios()) {
        CAPTURE(sc.name);
        const Trial t = sc.run(0.0, 1);
        REQUIRE(t.fit.converged);
        for (const auto& [name, truth] : t.truth) {
            CAPTURE(name);
            CHECK(rel(t.fit.value(name), truth) < 1e-6);
        }
    }
}

TEST_CASE("confidence interval coverage at 3 percent noise")
{
    // 500 trials per scenario: binomial scatter of the 95 percent coverage is
    // about one percent, so the band is three standard deviations wide.
    const int trials = 500;
    for (const auto& sc : fit_scenarios()) {
        std::map<std::string, int> covered;
        for (int seed = 1; seed <= trials; ++seed) {
            const Trial t = sc.run(0.03, 5000 + static_cast<std::uint64_t>(seed));
            REQUIRE(t.fit.converged);
            for (const auto& [name, truth] : t.truth) {
                covered[name] += confidence_interval(t.fit, name).contains(truth);
            }
        }
        for (const auto& [name, n] : covered) {
            CAPTURE(sc.name);
            CAPTURE(name);
            const double frac = static_cast<double>(n) / trials;
            CHECK(frac >= 0.92);
            CHECK(frac <= 0.98);
        }
    }
}

TEST_CASE("affine")
{
    const std::vector<double> x{1.0, 3.0}, y{2.0, 8.0};
    const FitReport two = fit_affine(x, y);
    CHECK(two.value("slope") == doctest::Approx(3.0));
    CHECK(two.value("intercept") == doctest::Approx(-1.0));
    CHECK(!two.warnings.empty());
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0}, flat{2.0, 4.0, 4.0, 2.0};
    const FitReport f = fit_affine(xs, flat);
    CHECK(f.value("slope") == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.value("intercept") == doctest::Approx(3.0));
    const std::vector<double> same{2.0, 2.0, 2.0};
    CHECK(!fit_affine(same, std::vector<double>{1.0, 2.0, 3.0}).converged);
}

TEST_CASE("lorentzian")
{
    const auto f = linspace(-10.0, 10.0, 2001);
    const FitReport unit = fit_lorentzian(lorentz_trace(f, 0.0, 1.0, 1.0, 0.0));
    REQUIRE(unit.converged);
    CHECK(unit.value("area") == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(unit.value("fwhm") == doctest::Approx(1.0).epsilon(1e-6));

    const FitReport dip = fit_lorentzian(lorentz_trace(f, 1.0, 0.5, -0.3, 2.0));
    REQUIRE(dip.converged);
    CHECK(rel(dip.value("area"), -0.3) < 0.01);

    // Coarse sampling is flagged.
    const FitReport coarse = fit_lorentzian(lorentz_trace(linspace(-10.0, 10.0, 41), 0.0, 1.0, 1.0, 0.0));
    CHECK(!coarse.warnings.empty());
    CHECK(unit.warnings.empty());
    CHECK_THROWS(fit_lorentzian(lorentz_trace(linspace(-1.0, 1.0, 4), 0.0, 1.0, 1.0, 0.0)));
}

TEST_CASE("lorentzian area against quadrature")
{
    Gauss rng(3);
    const double w = 0.2;
    const auto f = linspace(-10.0, 10.0, 1001); // 10 points per fwhm
    SpectrumTrace t = lorentz_trace(f, 0.5, w, 4.0, 1.0);
    for (double& v : t.values) {
        v += 0.01 * rng();
    }
    const FitReport fit = fit_lorentzian(t);
    REQUIRE(fit.converged);
    double q = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        q += 0.5 * (t.values[i] + t.values[i - 1] - 2 * fit.value("offset")) * (f[i] - f[i - 1]);
    }
    CHECK(rel(fit.value("area"), q) < 0.02);
}

TEST_CASE("lorentzian: second device linewidth in distribution")
{
    // 2.60 mHz line with noise chosen to give roughly a 0.15 mHz error.
    const double w = 2.60e-3;
    const auto f = linspace(-0.02, 0.02, 161);
    std::vector<double> est, err;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Gauss rng(seed);
        SpectrumTrace t = lorentz_trace(f, 0.0, w, 1.0, 10.0);
        const double peak = 1.0 / (std::numbers::pi * w / 2);
        for (double& v : t.values) {
            v += 0.05 * peak * rng();
        }
        const FitReport fit = fit_lorentzian(t);
        REQUIRE(fit.converged);
        est.push_back(fit.value("fwhm"));
        err.push_back(fit.error("fwhm"));
    }
    CHECK(rel(mean(err), 0.15e-3) < 0.5);
    CHECK(std::abs(mean(est) - w) < 3 * stdev(est) / std::sqrt(60.0));
    CHECK(rel(stdev(est), mean(err)) < 0.25);
}

TEST_CASE("exponential decay")
{
    const FitReport exact = fit_exponential_decay(exp_trace(4.0, 0.013, 1.0, 300, 5.0));
    REQUIRE(exact.converged);
    CHECK(rel(exact.value("gamma"), 0.013) < 1e-10);
    CHECK(rel(exact.value("amplitude"), 4.0) < 1e-10);
    CHECK(exact.constants.at("t_ref_s") == 5.0);

    // Additive noise: the tail below the floor is cut.
    TimeTrace noisy = exp_trace(1.0, 0.05, 1.0, 400);
    add_white_noise(noisy, 1e-3, 5);
    const FitReport cut = fit_exponential_decay(noisy);
    REQUIRE(cut.converged);
    CHECK(cut.n_points < 400);
    CHECK(rel(cut.value("gamma"), 0.05) < 0.02);

    TimeTrace neg = exp_trace(1.0, 0.05, 1.0, 3);
    neg.samples[0] = -1.0;
    CHECK_THROWS(fit_exponential_decay(neg));
}

TEST_CASE("exponential decay: second device rate in distribution")
{
    // Ringdown at 2.13 mHz with multiplicative noise giving a 0.02 mHz error.
    const double g = hz_to_rad(2.13e-3);
    std::vector<double> est, err;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Gauss rng(seed);
        TimeTrace e = exp_trace(1.0, g, 1.0, 300);
        for (auto& s : e.samples) {
            s *= std::exp(0.07 * rng());
        }
        ExponentialOptions o;
        o.weighting = DecayWeighting::relative;
        const FitReport fit = fit_exponential_decay(e, o);
        REQUIRE(fit.converged);
        est.push_back(rad_to_hz(fit.value("gamma")));
        err.push_back(rad_to_hz(fit.error("gamma")));
    }
    CHECK(rel(mean(err), 0.02e-3) < 0.5);
    CHECK(std::abs(mean(est) - 2.13e-3) < 3 * stdev(est) / std::sqrt(60.0));
    CHECK(rel(stdev(est), mean(err)) < 0.25);
}

TEST_CASE("gamma versus power")
{
    const double gm = hz_to_rad(1e-3);
    const double p0 = dbm_to_watts(-38.7);
    std::vector<PowerRatePoint> pts;
    for (double p : logspace(p0, 100 * p0, 8)) {
        pts.push_back({p, gm * (1 + p / p0), 0.0});
    }
    const FitReport f = fit_gamma_vs_power(pts);
    REQUIRE(f.converged);
    CHECK(rel(f.value("gamma_m"), gm) < 1e-9);
    CHECK(rel(f.value("p0"), p0) < 1e-9);

    const std::vector<PowerRatePoint> narrow(pts.begin(), pts.begin() + 3);
    CHECK_THROWS(fit_gamma_vs_power(narrow));
    const std::vector<PowerRatePoint> few(pts.begin(), pts.begin() + 2);
    CHECK_THROWS(fit_gamma_vs_power(few));

    // Rates falling with power give a non-physical corner.
    std::vector<PowerRatePoint> falling;
    for (double p : logspace(p0, 100 * p0, 8)) {
        falling.push_back({p, gm * (5.0 - p / (30 * p0)), 0.0});
    }
    const FitReport bad = fit_gamma_vs_power(falling);
    CHECK(!bad.converged);
    CHECK(!bad.diagnostics.empty());
}

TEST_CASE("gamma versus power: single decade precision")
{
    const double gm = hz_to_rad(1e-3);
    const double p0 = dbm_to_watts(-38.7);
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Gauss rng(seed);
        std::vector<PowerRatePoint> pts;
        for (double p : logspace(p0, 10 * p0, 10)) {
            const double g = gm * (1 + p / p0);
            pts.push_back({p, g * (1 + 0.01 * rng()), 0.01 * g});
        }
        const FitReport f = fit_gamma_vs_power(pts);
        REQUIRE(f.converged);
        CHECK(f.error("p0") / f.value("p0") < 0.05);
        est.push_back(f.value("p0"));
    }
    CHECK(stdev(est) / p0 < 0.05);
}

TEST_CASE("s11")
{
    // Critical coupling nulls the reflection on resonance.
    CHECK(std::abs(s11_model(omega_c, omega_c, kappa, kappa / 2)) < 1e-15);
    CHECK(std::abs(s11_model(omega_c + 100 * kappa, omega_c, kappa, kappa_ex)) == doctest::Approx(1.0).epsilon(1e-3));

    const auto f = linspace(8.349e9 - 1e6, 8.349e9 + 1e6, 301);
    S11Trace tr;
    for (double x : f) {
        tr.frequencies_hz.push_back(x);
        tr.values.push_back(s11_model(hz_to_rad(x), omega_c, kappa, kappa_ex, std::polar(0.3, -1.2)));
    }
    const FitReport base = fit_s11(tr);
    REQUIRE(base.converged);
    CHECK(base.value("eta") == doctest::Approx(0.81).epsilon(0.01));
    CHECK(rel(base.value("kappa"), kappa) < 1e-8);
    CHECK(base.value("gain_abs") == doctest::Approx(0.3));
    CHECK(base.warnings.empty());

    // Rotating the whole trace only moves the gain phase.
    for (double phi : {0.5, 2.0, -2.9}) {
        S11Trace rot = tr;
        for (auto& v : rot.values) {
            v *= std::polar(1.0, phi);
        }
        const FitReport r = fit_s11(rot);
        REQUIRE(r.converged);
        CHECK(rel(r.value("omega_c"), base.value("omega_c")) < 1e-12);
        CHECK(rel(r.value("kappa"), base.value("kappa")) < 1e-8);
        CHECK(rel(r.value("kappa_ex"), base.value("kappa_ex")) < 1e-8);
    }

    // A narrow span is flagged.
    S11Trace narrow;
    for (double x : linspace(8.349e9 - 2e5, 8.349e9 + 2e5, 101)) {
        narrow.frequencies_hz.push_back(x);
        narrow.values.push_back(s11_model(hz_to_rad(x), omega_c, kappa, kappa_ex));
    }
    CHECK(!fit_s11(narrow).warnings.empty());
}

TEST_CASE("s11: magnitude only")
{
    S11Trace tr;
    for (double x : linspace(8.349e9 - 1e6, 8.349e9 + 1e6, 301)) {
        tr.frequencies_hz.push_back(x);
        tr.values.emplace_back(std::abs(s11_model(hz_to_rad(x), omega_c, kappa, kappa_ex, 0.5)), 0.0);
    }
    S11Options o;
    o.magnitude_only = true;
    o.overcoupled_hint = true;
    const FitReport over = fit_s11(tr, o);
    REQUIRE(over.converged);
    CHECK(over.value("eta") == doctest::Approx(183.0 / 226.0).epsilon(1e-6));
    CHECK(over.constants.count("magnitude_only"));
    o.overcoupled_hint = false;
    const FitReport under = fit_s11(tr, o);
    REQUIRE(under.converged);
    CHECK(under.value("eta") == doctest::Approx(1 - 183.0 / 226.0).epsilon(1e-6));
    o.overcoupled_hint.reset();
    CHECK(!fit_s11(tr, o).warnings.empty());
}

TEST_CASE("s11: Table parameters with 1 percent noise")
{
    int within = 0;
    const int trials = 40;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        Gauss rng(seed);
        S11Trace tr;
        for (double x : linspace(8.349e9 - 1e6, 8.349e9 + 1e6, 401)) {
            tr.frequencies_hz.push_back(x);
            tr.values.push_back(s11_model(hz_to_rad(x), omega_c, kappa, kappa_ex) +
                                0.01 * std::complex<double>(rng(), rng()));
        }
        const FitReport f = fit_s11(tr);
        REQUIRE(f.converged);
        CHECK(std::abs(f.value("eta") - 0.81) < 0.01);
        within += std::abs(f.value("kappa_ex") - kappa_ex) < f.error("kappa_ex");
    }
    CHECK(within > trials / 2);
}

TEST_CASE("thermal calibration")
{
    const double apq = 3.0e-3;
    std::vector<ThermalPoint> pts;
    std::vector<ThermalPoint> pre;
    for (double t : {0.08, 0.1, 0.15, 0.25, 0.3, 0.4, 0.5, 0.6}) {
        const double corr = 1.0 + 0.15 * t;
        const double a = thermal_occupation(t, omega_m) * apq;
        pts.push_back({t, a / corr, corr, 0.0});
        pre.push_back({t, a, 1.0, 0.0});
    }
    const ThermalCalibration c = thermal_calibration(pts, omega_m);
    REQUIRE(c.fit.converged);
    CHECK(rel(c.constant.quanta_per_area, 1.0 / apq) < 1e-9);
    CHECK(c.constant.valid_above == doctest::Approx(0.2));
    CHECK(c.constant.bath_extrapolation == doctest::Approx(0.08).epsilon(1e-6));
    CHECK(!c.fit.warnings.empty()); // points below 200 mK were excluded

    // Corrections are equivalent to pre-multiplied areas.
    const ThermalCalibration d = thermal_calibration(pre, omega_m);
    CHECK(rel(d.constant.quanta_per_area, c.constant.quanta_per_area) < 1e-12);

    // Base point with noise elsewhere: bath within 5 percent.
    Gauss rng(2);
    std::vector<ThermalPoint> noisy = pts;
    for (std::size_t i = 1; i < noisy.size(); ++i) {
        noisy[i].area *= 1 + 0.02 * rng();
    }
    CHECK(thermal_calibration(noisy, omega_m).constant.bath_extrapolation == doctest::Approx(0.08).epsilon(0.05));

    const std::vector<ThermalPoint> cold(pts.begin(), pts.begin() + 4);
    CHECK_THROWS(thermal_calibration(cold, omega_m));
    ThresholdOptions all;
    all.include_below = true;
    // Fewer than three points above the threshold is rejected either way.
    CHECK_THROWS(thermal_calibration(cold, omega_m, all));
    const ThermalCalibration every = thermal_calibration(pts, omega_m, all);
    REQUIRE(every.fit.converged);
    CHECK(every.fit.n_points == pts.size());
    CHECK(rel(every.constant.quanta_per_area, 1.0 / apq) < 1e-9);
    CHECK(temperature_from_occupation(thermal_occupation(0.08, omega_m), omega_m) == doctest::Approx(0.08));
    CHECK(temperature_from_occupation(0.0, omega_m) == 0.0);
}

TEST_CASE("gorodetsky")
{
    const double phi = 0.02;
    const double wmod = hz_to_rad(1.4862e6);
    const double g0 = hz_to_rad(0.89);
    const double n = thermal_occupation(0.3, omega_m);
    CHECK(gorodetsky_ratio(g0, n, phi, wmod) == doctest::Approx(4 * g0 * g0 * n / (phi * phi * wmod * wmod)));

    std::vector<RatioPoint> zero;
    for (double t : {0.25, 0.3, 0.4, 0.5}) {
        zero.push_back({t, 0.0, 0.0});
    }
    const FitReport z = gorodetsky_g0(zero, phi, wmod, omega_m);
    CHECK(z.value("g0") == 0.0);

    std::vector<RatioPoint> negative;
    for (double t : {0.25, 0.3, 0.4, 0.5}) {
        negative.push_back({t, t - 1.0, 0.0});
    }
    CHECK(!gorodetsky_g0(negative, phi, wmod, omega_m).converged);
}

TEST_CASE("gorodetsky: device-shaped data")
{
    // Linear above 200 mK, scattered below; 12 percent scatter on each point.
    std::vector<double> est, err;
    const double phi = 0.02;
    const double wmod = hz_to_rad(1.4862e6);
    const double g0 = hz_to_rad(0.89);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Gauss rng(seed);
        std::vector<RatioPoint> pts;
        for (double t : {0.03, 0.06, 0.1, 0.15, 0.25, 0.35, 0.5}) {
            const double r = gorodetsky_ratio(g0, thermal_occupation(t, omega_m), phi, wmod);
            const double scatter = t < 0.2 ? 0.8 : 0.45;
            pts.push_back({t, r * (1 + scatter * rng()), 0.0});
        }
        const FitReport f = gorodetsky_g0(pts, phi, wmod, omega_m);
        if (f.converged) {
            est.push_back(rad_to_hz(f.value("g0")));
            err.push_back(rad_to_hz(f.error("g0")));
        }
    }
    REQUIRE(est.size() > 50);
    CHECK(std::abs(mean(est) - 0.89) < 3 * stdev(est) / std::sqrt(static_cast<double>(est.size())));
    CHECK(mean(err) == doctest::Approx(0.11).epsilon(0.5));
}

TEST_CASE("tls power law")
{
    std::vector<RatePoint> flat;
    for (double t : logspace(0.02, 0.5, 8)) {
        flat.push_back({t, 2.0});
    }
    const FitReport f = fit_tls_power_law(flat);
    CHECK(f.value("alpha") == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.value("gamma_ref") == doctest::Approx(2.0));
    CHECK(f.constants.at("t_ref_k") == doctest::Approx(std::sqrt(0.02 * 0.5)));

    int within = 0;
    for (double alpha : {0.63, 0.76}) {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            Gauss rng(seed);
            std::vector<RatePoint> pts;
            for (double t : logspace(0.02, 0.5, 10)) {
                pts.push_back({t, std::pow(t, alpha) * (1 + 0.1 * rng())});
            }
            const FitReport r = fit_tls_power_law(pts);
            within += std::abs(r.value("alpha") - alpha) < r.error("alpha");
        }
    }
    CHECK(within > 30);

    CHECK_THROWS(fit_tls_power_law(std::vector<RatePoint>{{0.0, 1.0}, {0.1, 1.0}, {0.2, 1.0}}));
    CHECK_THROWS(fit_tls_power_law(std::vector<RatePoint>{{0.1, -1.0}, {0.2, 1.0}, {0.3, 1.0}}));
}

}
