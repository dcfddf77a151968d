#include <doctest.h>

#include <complex>
#include <vector>

#include "cemech/kernels.hpp"
#include "cemech/timedomain.hpp"
#include "support.hpp"

using namespace cemech;
using namespace testing;

TEST_SUITE("kernels") {

TEST_CASE("rwa kernel: serial and parallel agree bit for bit")
{
    const kernels::RwaCoefficients c{1.7, 3.2e-3, 0.5, omega_m};
    const auto f = linspace(1.4e6, 1.6e6, 100003);
    std::vector<double> a(f.size()), b(f.size());
    kernels::serial::evaluate_rwa(c, f, a);
    kernels::omp::evaluate_rwa(c, f, b);
    CHECK(a == b);
    CHECK(a[500] == kernels::rwa_value(c, hz_to_rad(f[500])));
}

TEST_CASE("full kernel: serial and parallel agree bit for bit")
{
    const kernels::FullCoefficients c{1.1, kappa / 2, -omega_m, 2.0e-3, -1.0e-5, 0.7, omega_m, 0.3};
    const auto f = linspace(-3e6, 3e6, 99991);
    std::vector<double> a(f.size()), b(f.size());
    kernels::serial::evaluate_full(c, f, a);
    kernels::omp::evaluate_full(c, f, b);
    CHECK(a == b);
    std::vector<double> wrong(3);
    CHECK_THROWS(kernels::serial::evaluate_full(c, f, wrong));
}

TEST_CASE("periodogram: serial and parallel agree bit for bit")
{
    TimeTrace t;
    t.sample_rate = 10.0;
    t.samples.assign(1 << 15, {0.0, 0.0});
    add_white_noise(t, 1.0, 4);
    const auto w = kernels::window_coefficients(kernels::Window::hann, 1024);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + 1024 <= t.size(); s += 512) {
        starts.push_back(s);
    }
    const kernels::PeriodogramRequest req{t.samples, starts, w};
    CHECK(kernels::serial::periodogram_sum(req) == kernels::omp::periodogram_sum(req));

    const SpectrumTrace a = welch_psd(t, 1024, 0.5);
    const SpectrumTrace b = welch_psd_serial(t, 1024, 0.5);
    CHECK(a.values == b.values);
    CHECK(a.frequencies_hz == b.frequencies_hz);
}

TEST_CASE("window coefficients")
{
    const auto r = kernels::window_coefficients(kernels::Window::rectangular, 8);
    for (double v : r) {
        CHECK(v == 1.0);
    }
    const auto h = kernels::window_coefficients(kernels::Window::hann, 8);
    CHECK(h[0] == doctest::Approx(0.0));
    CHECK(kernels::max_threads() >= 1);
}

}
