#pragma once

// Time-domain simulation of the demodulated mechanical amplitude and the
// spectral tools used on such traces.
//
// Traces are slow complex envelopes in a frame rotating at the demodulation
// frequency; a component at +f in the frame shows up at +f in welch_psd.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cemech/kernels.hpp"
#include "cemech/spectrum.hpp"

namespace cemech {

enum class SampleKind { complex_amplitude, real };

struct TimeTrace {
    double sample_rate = 0.0; // Hz
    double t0 = 0.0;          // s
    SampleKind kind = SampleKind::complex_amplitude;
    /// Real traces keep a zero imaginary part.
    std::vector<std::complex<double>> samples;
    std::string source;
    std::vector<std::string> warnings;

    std::size_t size() const { return samples.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
    std::vector<double> real_values() const;
    void validate() const;
};

/// |x|^2 as a real trace.
TimeTrace energy(const TimeTrace& trace);

/// Samples [begin, end) with t0 shifted accordingly.
TimeTrace slice(const TimeTrace& trace, std::size_t begin, std::size_t end);

/// Adds white Gaussian noise: complex traces get E|n|^2 = sigma^2 split evenly
/// over I and Q, real traces get standard deviation sigma.
void add_white_noise(TimeTrace& trace, double sigma, std::uint64_t seed);

/// Excite / amplify / decay sequence. Rates are angular (rad/s) energy rates,
/// so the amplitude moves at half of them.
struct RingdownProtocol {
    double excite_duration = 0.0;
    double amplify_duration = 0.0;
    double decay_duration = 0.0;
    double excite_rate = 0.0; // amplitude growth per second from the coherent drive
    double gamma_blue = 0.0;  // anti-damping while the pump sits on the blue side
    double gamma_red = 0.0;   // total damping with the red-detuned pump
    double initial_amplitude = 0.0;
    double frequency_offset_hz = 0.0; // mechanical frequency minus demodulation frequency
    double drift_hz_per_s = 0.0;      // linear drift of that offset

    void validate() const;
};

struct RingdownSimulation {
    TimeTrace amplitude;
    std::size_t decay_start = 0; // first sample of the free decay
};

RingdownSimulation simulate_ringdown(const RingdownProtocol& protocol, double fs);

struct ThermalRates {
    double gamma_eff = 0.0;    // energy decay rate, rad/s
    double omega_offset = 0.0; // rotation in the demodulated frame, rad/s
};

/// Stationary complex Ornstein-Uhlenbeck amplitude with relaxation gamma_eff/2,
/// rotation omega_offset and E|a|^2 = occupation, advanced with the exact
/// discrete update. Deterministic for a given seed.
TimeTrace simulate_thermal_trajectory(const ThermalRates& rates, double occupation, double fs,
                                      double duration, std::uint64_t seed);

/// Two-sided averaged modified periodogram, DC-centred frequency axis.
/// Normalized so that sum(psd) * df equals the mean of |x|^2 (exactly, for a
/// rectangular window and segments tiling the trace).
SpectrumTrace welch_psd(const TimeTrace& trace, std::size_t segment_length, double overlap,
                        kernels::Window window = kernels::Window::hann);

/// Same, evaluated with the serial reference kernel.
SpectrumTrace welch_psd_serial(const TimeTrace& trace, std::size_t segment_length, double overlap,
                               kernels::Window window = kernels::Window::hann);

/// Phase derivative (Hz) between consecutive samples, block-averaged over
/// `smoothing_window` seconds. Output time stamps are block centres.
TimeTrace instantaneous_frequency(const TimeTrace& trace, double smoothing_window);

} // namespace cemech
