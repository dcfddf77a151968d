#include "cemech/timedomain.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cemech/core.hpp"

namespace cemech {

namespace {

using cplx = std::complex<double>;

enum class KernelPath { parallel, serial };

SpectrumTrace welch_impl(const TimeTrace& trace, std::size_t segment_length, double overlap,
                         kernels::Window window, KernelPath path)
{
    trace.validate();
    if (segment_length < 2) {
        throw std::invalid_argument("welch_psd: segment length must be at least 2");
    }
    if (trace.size() < segment_length) {
        throw std::invalid_argument("welch_psd: trace shorter than one segment");
    }
    if (!(overlap >= 0.0) || !(overlap < 1.0)) {
        throw std::invalid_argument("welch_psd: overlap must lie in [0, 1)");
    }
    const auto step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(segment_length) * (1.0 - overlap))));
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + segment_length <= trace.size(); s += step) {
        starts.push_back(s);
    }
    const auto w = kernels::window_coefficients(window, segment_length);
    const double w2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

    kernels::PeriodogramRequest req{trace.samples, starts, w};
    const std::vector<double> acc =
        path == KernelPath::parallel ? kernels::omp::periodogram_sum(req) : kernels::serial::periodogram_sum(req);

    const std::size_t n = segment_length;
    const double fs = trace.sample_rate;
    const double norm = 1.0 / (static_cast<double>(starts.size()) * fs * w2);
    SpectrumTrace out;
    out.frequencies_hz.resize(n);
    out.values.resize(n);
    // Reorder bins from FFT order to ascending frequency: k = -n/2 .. n - n/2 - 1.
    const std::size_t neg = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<long long>(i) - static_cast<long long>(neg);
        const std::size_t bin = k < 0 ? static_cast<std::size_t>(k + static_cast<long long>(n))
                                      : static_cast<std::size_t>(k);
        out.frequencies_hz[i] = static_cast<double>(k) * fs / static_cast<double>(n);
        out.values[i] = acc[bin] * norm;
    }
    out.reference = FrequencyReference::pump_relative;
    out.unit = SpectrumUnit::arbitrary;
    out.metadata.resolution_bandwidth_hz = fs / static_cast<double>(n);
    out.metadata.averages = static_cast<long>(starts.size());
    out.metadata.source = trace.source.empty() ? "welch_psd" : trace.source;
    return out;
}

} // namespace

std::vector<double> TimeTrace::real_values() const
{
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = samples[i].real();
    }
    return out;
}

void TimeTrace::validate() const
{
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw std::invalid_argument("time trace: sample rate must be positive");
    }
    if (!std::isfinite(t0)) {
        throw std::invalid_argument("time trace: t0 must be finite");
    }
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw std::invalid_argument("time trace: samples must be finite");
        }
    }
}

TimeTrace energy(const TimeTrace& trace)
{
    TimeTrace out;
    out.sample_rate = trace.sample_rate;
    out.t0 = trace.t0;
    out.kind = SampleKind::real;
    out.source = trace.source;
    out.samples.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out.samples[i] = std::norm(trace.samples[i]);
    }
    return out;
}

TimeTrace slice(const TimeTrace& trace, std::size_t begin, std::size_t end)
{
    if (begin > end || end > trace.size()) {
        throw std::out_of_range("slice: range outside trace");
    }
    TimeTrace out = trace;
    out.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                       trace.samples.begin() + static_cast<std::ptrdiff_t>(end));
    out.t0 = trace.time(begin);
    return out;
}

void add_white_noise(TimeTrace& trace, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("add_white_noise: sigma must be >= 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    if (trace.kind == SampleKind::real) {
        for (auto& s : trace.samples) {
            s += sigma * normal(rng);
        }
        return;
    }
    const double q = sigma / std::sqrt(2.0);
    for (auto& s : trace.samples) {
        const double re = normal(rng);
        const double im = normal(rng);
        s += cplx(q * re, q * im);
    }
}

void RingdownProtocol::validate() const
{
    if (!(excite_duration >= 0.0) || !(amplify_duration >= 0.0) || !(decay_duration >= 0.0)) {
        throw std::invalid_argument("ringdown protocol: durations must be >= 0");
    }
    if (!(gamma_red > 0.0)) {
        throw std::invalid_argument("ringdown protocol: gamma_red must be positive");
    }
    if (!(gamma_blue >= 0.0) || !(excite_rate >= 0.0) || !(initial_amplitude >= 0.0)) {
        throw std::invalid_argument("ringdown protocol: gamma_blue, excite_rate and initial amplitude must be >= 0");
    }
}

RingdownSimulation simulate_ringdown(const RingdownProtocol& p, double fs)
{
    p.validate();
    const double total = p.excite_duration + p.amplify_duration + p.decay_duration;
    const double max_rate_hz = std::max(p.gamma_red, p.gamma_blue) / two_pi;
    const double max_offset_hz =
        std::max(std::abs(p.frequency_offset_hz), std::abs(p.frequency_offset_hz + p.drift_hz_per_s * total));
    if (!(fs > 10.0 * max_rate_hz) || !(fs > 4.0 * max_offset_hz)) {
        throw std::invalid_argument("simulate_ringdown: sample rate too low for the protocol rates");
    }

    const auto n = static_cast<std::size_t>(std::llround(total * fs)) + 1;
    RingdownSimulation sim;
    auto& tr = sim.amplitude;
    tr.sample_rate = fs;
    tr.t0 = 0.0;
    tr.kind = SampleKind::complex_amplitude;
    tr.source = "simulate_ringdown";
    tr.samples.resize(n);

    // Magnitude at the phase boundaries, each phase in closed form.
    const double a_ss = 2.0 * p.excite_rate / p.gamma_red;
    auto excite = [&](double t) {
        return a_ss + (p.initial_amplitude - a_ss) * std::exp(-0.5 * p.gamma_red * t);
    };
    const double amp_rate = p.gamma_blue > 0.0 ? 0.5 * p.gamma_blue : -0.5 * p.gamma_red;
    const double a1 = excite(p.excite_duration);
    const double a2 = a1 * std::exp(amp_rate * p.amplify_duration);
    const double t_decay = p.excite_duration + p.amplify_duration;

    sim.decay_start = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        double mag;
        if (t < p.excite_duration) {
            mag = excite(t);
        } else if (t < t_decay) {
            mag = a1 * std::exp(amp_rate * (t - p.excite_duration));
        } else {
            if (sim.decay_start == n) {
                sim.decay_start = i;
            }
            mag = a2 * std::exp(-0.5 * p.gamma_red * (t - t_decay));
        }
        const double phase = two_pi * (p.frequency_offset_hz * t + 0.5 * p.drift_hz_per_s * t * t);
        tr.samples[i] = std::polar(mag, phase);
    }
    return sim;
}

TimeTrace simulate_thermal_trajectory(const ThermalRates& rates, double occupation, double fs,
                                      double duration, std::uint64_t seed)
{
    if (!(rates.gamma_eff > 0.0)) {
        throw std::invalid_argument("simulate_thermal_trajectory: gamma_eff must be positive");
    }
    if (!(occupation >= 0.0)) {
        throw std::invalid_argument("simulate_thermal_trajectory: occupation must be >= 0");
    }
    if (!(fs > 10.0 * rates.gamma_eff / two_pi) || !(fs > 4.0 * std::abs(rates.omega_offset) / two_pi)) {
        throw std::invalid_argument("simulate_thermal_trajectory: sample rate too low");
    }
    if (!(duration > 0.0)) {
        throw std::invalid_argument("simulate_thermal_trajectory: duration must be positive");
    }

    TimeTrace tr;
    tr.sample_rate = fs;
    tr.kind = SampleKind::complex_amplitude;
    tr.source = "simulate_thermal_trajectory";
    const auto n = static_cast<std::size_t>(std::llround(duration * fs));
    tr.samples.assign(n, cplx(0.0, 0.0));
    if (duration * rates.gamma_eff < 10.0) {
        tr.warnings.emplace_back("thermal trajectory shorter than 10 / gamma_eff: poor statistics");
    }
    if (occupation == 0.0 || n == 0) {
        return tr;
    }

    const double dt = 1.0 / fs;
    const cplx step = std::exp(cplx(-0.5 * rates.gamma_eff, rates.omega_offset) * dt);
    const double innov_var = occupation * -std::expm1(-rates.gamma_eff * dt);
    const double q_innov = std::sqrt(0.5 * innov_var);
    const double q_stat = std::sqrt(0.5 * occupation);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    cplx a(q_stat * normal(rng), q_stat * normal(rng));
    for (std::size_t i = 0; i < n; ++i) {
        tr.samples[i] = a;
        const double re = normal(rng);
        const double im = normal(rng);
        a = a * step + cplx(q_innov * re, q_innov * im);
    }
    return tr;
}

SpectrumTrace welch_psd(const TimeTrace& trace, std::size_t segment_length, double overlap,
                        kernels::Window window)
{
    return welch_impl(trace, segment_length, overlap, window, KernelPath::parallel);
}

SpectrumTrace welch_psd_serial(const TimeTrace& trace, std::size_t segment_length, double overlap,
                               kernels::Window window)
{
    return welch_impl(trace, segment_length, overlap, window, KernelPath::serial);
}

TimeTrace instantaneous_frequency(const TimeTrace& trace, double smoothing_window)
{
    trace.validate();
    if (trace.kind != SampleKind::complex_amplitude) {
        throw std::invalid_argument("instantaneous_frequency: needs a complex (I/Q) trace");
    }
    const auto w = static_cast<std::size_t>(std::llround(smoothing_window * trace.sample_rate));
    if (w < 2) {
        throw std::invalid_argument("instantaneous_frequency: smoothing window shorter than 2 samples");
    }
    if (trace.size() < w + 1) {
        throw std::invalid_argument("instantaneous_frequency: trace shorter than the smoothing window");
    }

    TimeTrace out;
    out.kind = SampleKind::real;
    out.sample_rate = trace.sample_rate / static_cast<double>(w);
    out.t0 = trace.t0 + 0.5 * static_cast<double>(w) / trace.sample_rate;
    out.source = trace.source;

    double peak = 0.0;
    for (const auto& s : trace.samples) {
        peak = std::max(peak, std::abs(s));
    }
    std::size_t starved = 0;
    const std::size_t blocks = (trace.size() - 1) / w;
    out.samples.resize(blocks);
    const double scale = trace.sample_rate / two_pi;
    for (std::size_t b = 0; b < blocks; ++b) {
        double sum = 0.0;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = b * w + j;
            const cplx z = trace.samples[k + 1] * std::conj(trace.samples[k]);
            if (std::abs(trace.samples[k]) <= 1e-12 * peak) {
                ++starved;
            }
            sum += std::arg(z);
        }
        out.samples[b] = scale * sum / static_cast<double>(w);
    }
    if (starved > 0 || peak == 0.0) {
        out.warnings.emplace_back("instantaneous_frequency: " + std::to_string(starved) +
                                  " samples with vanishing amplitude; phase undefined there");
    }
    return out;
}

} // namespace cemech
