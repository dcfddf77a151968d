#pragma once

// Output microwave power spectral density, in noise quanta, of a
// sideband-pumped electromechanical system.
//
// All frequency grids handed to these functions are pump-relative and in Hz
// (so the cooling sideband of a red-detuned pump sits near +omega_m / 2 pi).
// Grids are caller-supplied and never resampled.

#include <span>
#include <string>
#include <vector>

namespace cemech {

struct NoiseBudget {
    double n_add = 0.0; // amplifier added noise
    double n_c = 0.0;   // pump phase noise / cavity frequency noise
    double n_0 = 0.0;   // thermal occupation of the microwave bath
    double eta = 1.0;   // kappa_ex / kappa

    /// eta n_c + (1 - eta) n_0, always derived from the fields above.
    double n_tilde() const { return eta * n_c + (1.0 - eta) * n_0; }
    void validate() const;
};

/// Off-resonant background S_bg = a_const + alpha P.
struct BackgroundModel {
    double a_const = 0.0; // quanta
    double alpha = 0.0;   // quanta / W
};

enum class FrequencyReference { absolute, pump_relative };
enum class SpectrumUnit { quanta, watts_per_hz, arbitrary };

struct SpectrumMetadata {
    double resolution_bandwidth_hz = 0.0;
    long averages = 0;
    std::string source;
    std::vector<std::string> warnings;
};

struct SpectrumTrace {
    std::vector<double> frequencies_hz;
    std::vector<double> values;
    FrequencyReference reference = FrequencyReference::pump_relative;
    SpectrumUnit unit = SpectrumUnit::quanta;
    SpectrumMetadata metadata;

    std::size_t size() const { return values.size(); }
    /// Strictly increasing frequencies, finite values, equal lengths.
    void validate() const;
};

/// Rates entering the resolved-sideband spectrum (rad/s).
struct RwaRates {
    double gamma_m = 0.0;
    double gamma_e = 0.0;
    double omega_eff = 0.0;
    double eta = 1.0;
};

struct SpectrumNoise {
    double n_th = 0.0;
    double n_tilde = 0.0;
    double n_add = 0.0;
};

/// Resolved-sideband spectrum around the cooling sideband:
/// n_add + 4 eta (n~ + 1/2)
///   + eta G_m G_e [n_th + 1/2 - (2 + G_e/G_m)(n~ + 1/2)] / [G_eff^2/4 + (w - W_eff)^2].
SpectrumTrace spectrum_rwa(std::span<const double> freqs_hz, const RwaRates& rates,
                           const SpectrumNoise& noise);

/// Parameters of the general (non-RWA) spectrum, rad/s.
struct FullSystem {
    double kappa = 0.0;
    double kappa_ex = 0.0;
    double delta = 0.0;
    double omega_m = 0.0;
    double g = 0.0;
    double gamma_m = 0.0;
};

/// Shot-noise floor, mechanical term and noise/backaction cross term, both
/// mirrored sidebands included, plus n_add.
SpectrumTrace spectrum_full(std::span<const double> freqs_hz, const FullSystem& sys,
                            const SpectrumNoise& noise);

struct SpectrumComponents {
    double shot = 0.0;
    double mech = 0.0;
    double cross = 0.0;
    double n_add = 0.0;
    double total() const { return shot + mech + cross + n_add; }
};

/// Single-frequency breakdown of spectrum_full.
SpectrumComponents spectrum_full_components(double freq_hz, const FullSystem& sys,
                                            const SpectrumNoise& noise);

/// Closed-form integral over frequency (Hz) of the mechanical term around
/// one sideband: g^2 kappa_ex A2 [G_m (n_th + 1/2) + g^2 kappa A2 (n~ + 1/2)] / G_eff.
double mechanical_sideband_area(const FullSystem& sys, const SpectrumNoise& noise);

/// n~ at which the mechanical feature of spectrum_rwa vanishes (peak -> dip).
double squashing_threshold(double n_th, double gamma_e, double gamma_m);

double background_model_eval(double p, const BackgroundModel& model);

struct CavityNoiseEstimate {
    double n_tilde = 0.0;
    bool underflow = false; // s_bg below a_const; n_tilde clamped to 0
};

/// Invert S_bg = a_const + 4 eta n~.
CavityNoiseEstimate cavity_noise_from_background(double s_bg, double a_const, double eta);

} // namespace cemech
