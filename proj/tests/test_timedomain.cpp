#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "cemech/estimate.hpp"
#include "cemech/timedomain.hpp"
#include "support.hpp"

using namespace cemech;
using namespace testing;

namespace {

TimeTrace tone(double f, double amp, double fs, std::size_t n)
{
    TimeTrace t;
    t.sample_rate = fs;
    for (std::size_t i = 0; i < n; ++i) {
        t.samples.push_back(std::polar(amp, two_pi * f * static_cast<double>(i) / fs));
    }
    return t;
}

double mean_power(const TimeTrace& t)
{
    double s = 0.0;
    for (const auto& z : t.samples) {
        s += std::norm(z);
    }
    return s / static_cast<double>(t.size());
}

}

TEST_SUITE("timedomain") {

TEST_CASE("trace helpers")
{
    TimeTrace t = tone(1.0, 2.0, 100.0, 50);
    t.t0 = 3.0;
    CHECK(t.time(10) == doctest::Approx(3.1));
    const TimeTrace e = energy(t);
    CHECK(e.kind == SampleKind::real);
    for (double v : e.real_values()) {
        CHECK(v == doctest::Approx(4.0));
    }
    const TimeTrace s = slice(t, 10, 20);
    CHECK(s.size() == 10);
    CHECK(s.t0 == doctest::Approx(3.1));
    CHECK_THROWS(slice(t, 10, 60));
    TimeTrace bad = t;
    bad.sample_rate = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("white noise is seeded")
{
    TimeTrace a = tone(1.0, 0.0, 100.0, 20000);
    TimeTrace b = a;
    TimeTrace c = a;
    add_white_noise(a, 0.5, 42);
    add_white_noise(b, 0.5, 42);
    add_white_noise(c, 0.5, 43);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(mean_power(a) == doctest::Approx(0.25).epsilon(0.03));
    CHECK_THROWS(add_white_noise(a, -1.0, 1));
}

TEST_CASE("ringdown simulation")
{
    RingdownProtocol p;
    p.decay_duration = 100.0;
    p.gamma_red = hz_to_rad(1e-2);
    p.initial_amplitude = 3.0;
    const RingdownSimulation pure = simulate_ringdown(p, 10.0);
    CHECK(pure.decay_start == 0);
    for (std::size_t i = 0; i < pure.amplitude.size(); i += 97) {
        const double t = pure.amplitude.time(i);
        CHECK(std::abs(pure.amplitude.samples[i]) == doctest::Approx(3.0 * std::exp(-0.5 * p.gamma_red * t)));
    }

    RingdownProtocol measured;
    measured.excite_duration = 10.0;
    measured.amplify_duration = 1.75;
    measured.decay_duration = 600.0;
    measured.excite_rate = 1.0;
    measured.gamma_blue = hz_to_rad(0.5);
    measured.gamma_red = hz_to_rad(1e-3);
    const RingdownSimulation sim = simulate_ringdown(measured, 10.0);
    const TimeTrace e = energy(sim.amplitude);
    const auto v = e.real_values();
    const double ratio = v.back() / v[sim.decay_start];
    CHECK(ratio == doctest::Approx(std::exp(-two_pi * 1e-3 * 600.0)).epsilon(1e-3));
    CHECK(rel(ratio, 0.0231) < 0.01);
    // Amplification makes the start of the decay the largest value.
    CHECK(std::max_element(v.begin(), v.end()) - v.begin() == static_cast<long>(sim.decay_start));

    CHECK_THROWS(simulate_ringdown(measured, 1e-3));
    RingdownProtocol neg = measured;
    neg.gamma_red = 0.0;
    CHECK_THROWS(simulate_ringdown(neg, 10.0));
}

TEST_CASE("ringdown fit round trip")
{
    RingdownProtocol p;
    p.excite_duration = 10.0;
    p.amplify_duration = 1.75;
    p.decay_duration = 600.0;
    p.excite_rate = 1.0;
    p.gamma_blue = hz_to_rad(0.5);
    p.gamma_red = hz_to_rad(1e-3);
    const RingdownSimulation sim = simulate_ringdown(p, 10.0);
    const TimeTrace decay = slice(energy(sim.amplitude), sim.decay_start, sim.amplitude.size());
    const FitReport f = fit_exponential_decay(decay);
    REQUIRE(f.converged);
    CHECK(rel(f.value("gamma"), p.gamma_red) < 1e-3);

    // Log energy is linear in time during the decay: no curvature.
    const auto v = decay.real_values();
    std::vector<double> t, y;
    for (std::size_t i = 0; i < v.size(); i += 10) {
        t.push_back(decay.time(i));
        y.push_back(std::log(v[i]));
    }
    const FitReport line = fit_affine(t, y);
    CHECK(line.residual_rms < 1e-9);
}

TEST_CASE("thermal trajectory")
{
    const ThermalRates r{hz_to_rad(0.1), 0.0};
    const TimeTrace zero = simulate_thermal_trajectory(r, 0.0, 10.0, 100.0, 1);
    for (const auto& z : zero.samples) {
        CHECK(z == std::complex<double>(0.0, 0.0));
    }
    const TimeTrace a = simulate_thermal_trajectory(r, 100.0, 10.0, 500.0, 7);
    const TimeTrace b = simulate_thermal_trajectory(r, 100.0, 10.0, 500.0, 7);
    const TimeTrace c = simulate_thermal_trajectory(r, 100.0, 10.0, 500.0, 8);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);

    const TimeTrace short_run = simulate_thermal_trajectory(r, 100.0, 10.0, 5.0, 1);
    CHECK(!short_run.warnings.empty());
    CHECK_THROWS(simulate_thermal_trajectory(r, 100.0, 0.1, 100.0, 1));
    CHECK_THROWS(simulate_thermal_trajectory({0.0, 0.0}, 100.0, 10.0, 100.0, 1));
}

TEST_CASE("thermal trajectory stationary variance")
{
    const double g = hz_to_rad(0.1);
    const ThermalRates r{g, hz_to_rad(0.2)};
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const TimeTrace t = simulate_thermal_trajectory(r, 100.0, 5.0, 1000.0 / g, seed);
        within += std::abs(mean_power(t) / 100.0 - 1.0) < 0.1;
    }
    CHECK(within >= 95);
}

TEST_CASE("welch: single tone")
{
    const double fs = 128.0;
    const std::size_t seg = 256;
    // Tone on an exact bin.
    const double f1 = 10.0 * fs / seg;
    const TimeTrace t = tone(f1, 1.5, fs, 16 * seg);
    const SpectrumTrace p = welch_psd(t, seg, 0.0, kernels::Window::rectangular);
    const auto peak = std::max_element(p.values.begin(), p.values.end()) - p.values.begin();
    CHECK(p.frequencies_hz[static_cast<std::size_t>(peak)] == doctest::Approx(f1));
    const double df = p.frequencies_hz[1] - p.frequencies_hz[0];
    CHECK(p.values[static_cast<std::size_t>(peak)] * df == doctest::Approx(2.25).epsilon(1e-10));
    CHECK(std::accumulate(p.values.begin(), p.values.end(), 0.0) * df == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("welch: Parseval")
{
    TimeTrace t = tone(0.0, 0.0, 50.0, 4096);
    add_white_noise(t, 1.3, 3);
    const SpectrumTrace p = welch_psd(t, 512, 0.0, kernels::Window::rectangular);
    const double df = p.frequencies_hz[1] - p.frequencies_hz[0];
    CHECK(df == doctest::Approx(p.metadata.resolution_bandwidth_hz));
    const double sum = std::accumulate(p.values.begin(), p.values.end(), 0.0) * df;
    CHECK(rel(sum, mean_power(t)) < 1e-10);
    CHECK(p.metadata.averages == 8);
}

TEST_CASE("welch: white noise level")
{
    const double fs = 20.0;
    TimeTrace t = tone(0.0, 0.0, fs, 256 * 100);
    add_white_noise(t, 0.7, 9);
    const SpectrumTrace p = welch_psd(t, 256, 0.0);
    CHECK(p.metadata.averages >= 100);
    const double level = 0.49 / fs;
    const double mean = std::accumulate(p.values.begin(), p.values.end(), 0.0) / static_cast<double>(p.size());
    CHECK(mean == doctest::Approx(level).epsilon(0.02));
    // Each bin is an average of ~100 exponentials: 10 percent scatter.
    for (double v : p.values) {
        CHECK(std::abs(v / level - 1.0) < 0.6);
    }
}

TEST_CASE("welch: preconditions")
{
    const TimeTrace t = tone(1.0, 1.0, 10.0, 100);
    CHECK_THROWS(welch_psd(t, 200, 0.5));
    CHECK_THROWS(welch_psd(t, 1, 0.5));
    CHECK_THROWS(welch_psd(t, 50, 1.0));
}

TEST_CASE("welch: thermal line")
{
    const double g = hz_to_rad(0.1);
    const TimeTrace t = simulate_thermal_trajectory({g, 0.0}, 100.0, 10.0, 8192 * 60 / 10.0, 2024);
    const SpectrumTrace p = welch_psd(t, 8192, 0.5);
    CHECK(p.metadata.averages >= 100);
    const FitReport f = fit_lorentzian(p);
    REQUIRE(f.converged);
    CHECK(rel(f.value("fwhm"), 0.1) < 0.05);
    CHECK(rel(f.value("area"), 100.0) < 0.03);
    CHECK(std::abs(f.value("center")) < 0.01);
}

TEST_CASE("instantaneous frequency")
{
    const TimeTrace t = tone(0.37, 1.0, 20.0, 2000);
    const TimeTrace f = instantaneous_frequency(t, 1.0);
    for (double v : f.real_values()) {
        CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
    }

    // Linear chirp.
    TimeTrace chirp;
    chirp.sample_rate = 20.0;
    const double rate = 0.01;
    for (int i = 0; i < 4000; ++i) {
        const double s = i / 20.0;
        chirp.samples.push_back(std::polar(1.0, two_pi * (0.1 * s + 0.5 * rate * s * s)));
    }
    const TimeTrace cf = instantaneous_frequency(chirp, 2.0);
    for (std::size_t i = 0; i < cf.size(); ++i) {
        CHECK(cf.real_values()[i] == doctest::Approx(0.1 + rate * cf.time(i)).epsilon(1e-9));
    }

    CHECK_THROWS(instantaneous_frequency(t, 0.05));
    CHECK_THROWS(instantaneous_frequency(energy(t), 1.0));
}

TEST_CASE("drift recovery from a ringdown")
{
    RingdownProtocol p;
    p.decay_duration = 600.0;
    p.gamma_red = hz_to_rad(1e-3);
    p.initial_amplitude = 1.0;
    p.frequency_offset_hz = 0.05;
    p.drift_hz_per_s = 2.7e-6;
    RingdownSimulation sim = simulate_ringdown(p, 10.0);
    add_white_noise(sim.amplitude, 1e-3, 17);
    const TimeTrace f = instantaneous_frequency(sim.amplitude, 10.0);
    std::vector<double> t;
    for (std::size_t i = 0; i < f.size(); ++i) {
        t.push_back(f.time(i));
    }
    const FitReport line = fit_affine(t, f.real_values());
    REQUIRE(line.converged);
    CHECK(rel(line.value("slope"), 2.7e-6) < 0.05);
}

}
