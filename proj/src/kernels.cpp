#include "cemech/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cemech/core.hpp"

namespace cemech::kernels {

namespace {

// The FFTW planner is not reentrant; execution with fftw_execute_dft is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (data == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

class ForwardPlan {
public:
    explicit ForwardPlan(std::size_t n) : n_(n), in_(n), out_(n)
    {
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.data, out_.data, FFTW_FORWARD,
                                 FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            throw std::runtime_error("fftw: could not create plan");
        }
    }
    ~ForwardPlan()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    ForwardPlan(const ForwardPlan&) = delete;
    ForwardPlan& operator=(const ForwardPlan&) = delete;

    std::size_t size() const { return n_; }

    /// |FFT(w * x[start:])|^2 into `power`, using caller-owned scratch.
    void power(const PeriodogramRequest& req, std::size_t start, FftwBuffer& in, FftwBuffer& out,
               double* power) const
    {
        for (std::size_t k = 0; k < n_; ++k) {
            const auto v = req.samples[start + k] * req.window[k];
            in.data[k][0] = v.real();
            in.data[k][1] = v.imag();
        }
        fftw_execute_dft(plan_, in.data, out.data);
        for (std::size_t k = 0; k < n_; ++k) {
            power[k] = out.data[k][0] * out.data[k][0] + out.data[k][1] * out.data[k][1];
        }
    }

private:
    std::size_t n_;
    FftwBuffer in_;
    FftwBuffer out_;
    fftw_plan plan_ = nullptr;
};

void check_request(const PeriodogramRequest& req)
{
    const std::size_t n = req.window.size();
    if (n == 0) {
        throw std::invalid_argument("periodogram: empty window");
    }
    for (std::size_t s : req.starts) {
        if (s + n > req.samples.size()) {
            throw std::invalid_argument("periodogram: segment exceeds trace");
        }
    }
}

void check_sizes(std::span<const double> in, std::span<double> out)
{
    if (in.size() != out.size()) {
        throw std::invalid_argument("kernel: input and output sizes differ");
    }
}

} // namespace

std::vector<double> window_coefficients(Window window, std::size_t n)
{
    std::vector<double> w(n, 1.0);
    if (window == Window::hann && n > 1) {
        // Periodic Hann, the usual choice for spectral averaging.
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(k) / static_cast<double>(n));
        }
    }
    return w;
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace serial {

void evaluate_rwa(const RwaCoefficients& c, std::span<const double> freqs_hz, std::span<double> out)
{
    check_sizes(freqs_hz, out);
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        out[i] = rwa_value(c, two_pi * freqs_hz[i]);
    }
}

void evaluate_full(const FullCoefficients& c, std::span<const double> freqs_hz, std::span<double> out)
{
    check_sizes(freqs_hz, out);
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        out[i] = full_value(c, two_pi * freqs_hz[i]);
    }
}

std::vector<double> periodogram_sum(const PeriodogramRequest& req)
{
    check_request(req);
    const std::size_t n = req.window.size();
    ForwardPlan plan(n);
    FftwBuffer in(n), out(n);
    std::vector<double> acc(n, 0.0), power(n);
    for (std::size_t s : req.starts) {
        plan.power(req, s, in, out, power.data());
        for (std::size_t k = 0; k < n; ++k) {
            acc[k] += power[k];
        }
    }
    return acc;
}

} // namespace serial

namespace omp {

void evaluate_rwa(const RwaCoefficients& c, std::span<const double> freqs_hz, std::span<double> out)
{
    check_sizes(freqs_hz, out);
    const auto n = static_cast<std::ptrdiff_t>(freqs_hz.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = rwa_value(c, two_pi * freqs_hz[i]);
    }
}

void evaluate_full(const FullCoefficients& c, std::span<const double> freqs_hz, std::span<double> out)
{
    check_sizes(freqs_hz, out);
    const auto n = static_cast<std::ptrdiff_t>(freqs_hz.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = full_value(c, two_pi * freqs_hz[i]);
    }
}

std::vector<double> periodogram_sum(const PeriodogramRequest& req)
{
    check_request(req);
    const std::size_t n = req.window.size();
    ForwardPlan plan(n);
    std::vector<double> acc(n, 0.0);

    // Segments are transformed in parallel a block at a time, then added to
    // the accumulator in their original order so rounding matches serial.
    const std::size_t block = std::max<std::size_t>(16, 4 * static_cast<std::size_t>(max_threads()));
    std::vector<double> rows(block * n);
    for (std::size_t first = 0; first < req.starts.size(); first += block) {
        const std::size_t count = std::min(block, req.starts.size() - first);
#pragma omp parallel
        {
            FftwBuffer in(n), out(n);
#pragma omp for schedule(static)
            for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
                plan.power(req, req.starts[first + j], in, out, rows.data() + j * n);
            }
        }
        for (std::size_t j = 0; j < count; ++j) {
            const double* row = rows.data() + j * n;
            for (std::size_t k = 0; k < n; ++k) {
                acc[k] += row[k];
            }
        }
    }
    return acc;
}

} // namespace omp

} // namespace cemech::kernels
