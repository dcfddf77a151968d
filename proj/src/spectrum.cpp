#include "cemech/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include "cemech/backaction.hpp"
#include "cemech/core.hpp"
#include "cemech/kernels.hpp"

namespace cemech {

namespace {

struct FullSetup {
    kernels::FullCoefficients coeffs;
    BackactionResult rates;
    double a2 = 0.0; // |a_+|^2 + |a_-|^2
};

FullSetup setup_full(const FullSystem& sys, const SpectrumNoise& noise)
{
    if (!(sys.kappa > 0.0) || !(sys.kappa_ex > 0.0) || sys.kappa_ex > sys.kappa) {
        throw std::invalid_argument("spectrum_full: need 0 < kappa_ex <= kappa");
    }
    if (!(sys.omega_m > 0.0) || !(sys.gamma_m > 0.0)) {
        throw std::invalid_argument("spectrum_full: omega_m and gamma_m must be positive");
    }
    FullSetup s;
    s.rates = backaction_rates(sys.g, sys.delta, sys.omega_m, sys.kappa, sys.gamma_m);
    const auto chi = susceptibilities(sys.delta, sys.omega_m, sys.kappa);
    s.a2 = std::norm(chi.a_plus) + std::norm(chi.a_minus);

    const double eta = sys.kappa_ex / sys.kappa;
    const double g2 = sys.g * sys.g;
    const double nt = noise.n_tilde + 0.5;
    auto& c = s.coeffs;
    c.shot_prefactor = eta * sys.kappa * sys.kappa * nt;
    c.cavity_half = 0.5 * sys.kappa;
    c.delta = sys.delta;
    c.mech_prefactor = g2 * sys.kappa_ex * s.a2 *
                       (sys.gamma_m * (noise.n_th + 0.5) + g2 * sys.kappa * s.a2 * nt);
    // Real part of (a_- - a_+*): the symmetrized spectrum is real.
    const double re_cross = (chi.a_minus - std::conj(chi.a_plus)).real();
    c.cross_prefactor = g2 * sys.kappa * sys.kappa * eta * s.rates.gamma_eff * re_cross * s.a2 * nt;
    c.mech_half = 0.5 * s.rates.gamma_eff;
    c.omega_eff = s.rates.omega_eff;
    c.n_add = noise.n_add;
    return s;
}

void validate_noise(const SpectrumNoise& noise)
{
    if (!(noise.n_th >= 0.0) || !(noise.n_tilde >= 0.0) || !(noise.n_add >= 0.0)) {
        throw std::invalid_argument("spectrum: noise occupations must be >= 0");
    }
}

void validate_grid(std::span<const double> freqs_hz)
{
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        if (!std::isfinite(freqs_hz[i]) || (i > 0 && !(freqs_hz[i] > freqs_hz[i - 1]))) {
            throw std::invalid_argument("spectrum: frequency grid must be finite and strictly increasing");
        }
    }
}

} // namespace

void NoiseBudget::validate() const
{
    if (!(n_add >= 0.0) || !(n_c >= 0.0) || !(n_0 >= 0.0)) {
        throw std::invalid_argument("noise budget: occupations must be >= 0");
    }
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("noise budget: eta must lie in (0, 1]");
    }
}

void SpectrumTrace::validate() const
{
    if (frequencies_hz.size() != values.size()) {
        throw std::invalid_argument("spectrum trace: frequency and value lengths differ");
    }
    validate_grid(frequencies_hz);
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("spectrum trace: values must be finite");
        }
    }
}

SpectrumTrace spectrum_rwa(std::span<const double> freqs_hz, const RwaRates& rates,
                           const SpectrumNoise& noise)
{
    if (!(rates.gamma_m > 0.0)) {
        throw std::invalid_argument("spectrum_rwa: gamma_m must be positive");
    }
    if (!(rates.eta > 0.0) || rates.eta > 1.0) {
        throw std::invalid_argument("spectrum_rwa: eta must lie in (0, 1]");
    }
    validate_noise(noise);
    validate_grid(freqs_hz);

    SpectrumTrace out;
    if (rates.gamma_e < 0.0) {
        out.metadata.warnings.emplace_back(
            "spectrum_rwa: gamma_e < 0 (blue side); resolved-sideband cooling form does not apply");
    }
    const double gamma_eff = rates.gamma_m + rates.gamma_e;
    if (!(gamma_eff > 0.0)) {
        throw std::invalid_argument("spectrum_rwa: gamma_m + gamma_e must be positive");
    }
    kernels::RwaCoefficients c;
    c.floor = noise.n_add + 4.0 * rates.eta * (noise.n_tilde + 0.5);
    const double bracket = noise.n_th + 0.5 - (2.0 + rates.gamma_e / rates.gamma_m) * (noise.n_tilde + 0.5);
    c.numerator = rates.eta * rates.gamma_m * rates.gamma_e * bracket;
    c.half_width = 0.5 * gamma_eff;
    c.center = rates.omega_eff;

    out.frequencies_hz.assign(freqs_hz.begin(), freqs_hz.end());
    out.values.resize(freqs_hz.size());
    kernels::omp::evaluate_rwa(c, freqs_hz, out.values);
    out.reference = FrequencyReference::pump_relative;
    out.unit = SpectrumUnit::quanta;
    out.metadata.source = "spectrum_rwa";
    return out;
}

SpectrumTrace spectrum_full(std::span<const double> freqs_hz, const FullSystem& sys,
                            const SpectrumNoise& noise)
{
    validate_noise(noise);
    validate_grid(freqs_hz);
    const FullSetup s = setup_full(sys, noise);

    SpectrumTrace out;
    if (s.rates.weak_coupling_violated || !(s.rates.gamma_eff < 0.1 * sys.kappa)) {
        out.metadata.warnings.emplace_back(
            "spectrum_full: gamma_eff is not small against kappa (strong coupling); weak-coupling result only");
    }
    if (!(s.rates.gamma_eff > 0.0)) {
        throw std::invalid_argument("spectrum_full: gamma_eff <= 0 (parametric instability)");
    }
    out.frequencies_hz.assign(freqs_hz.begin(), freqs_hz.end());
    out.values.resize(freqs_hz.size());
    kernels::omp::evaluate_full(s.coeffs, freqs_hz, out.values);
    out.reference = FrequencyReference::pump_relative;
    out.unit = SpectrumUnit::quanta;
    out.metadata.source = "spectrum_full";
    return out;
}

SpectrumComponents spectrum_full_components(double freq_hz, const FullSystem& sys,
                                            const SpectrumNoise& noise)
{
    validate_noise(noise);
    const FullSetup s = setup_full(sys, noise);
    const auto t = kernels::full_terms(s.coeffs, two_pi * freq_hz);
    return {t.shot, t.mech, t.cross, noise.n_add};
}

double mechanical_sideband_area(const FullSystem& sys, const SpectrumNoise& noise)
{
    validate_noise(noise);
    const FullSetup s = setup_full(sys, noise);
    // The integral over f of 1 / (h^2 + (2 pi f)^2) is 1 / (2 h) = 1 / gamma_eff.
    return s.coeffs.mech_prefactor / s.rates.gamma_eff;
}

double squashing_threshold(double n_th, double gamma_e, double gamma_m)
{
    if (!(gamma_m > 0.0) || !(gamma_e >= 0.0)) {
        throw std::invalid_argument("squashing_threshold: need gamma_m > 0 and gamma_e >= 0");
    }
    return (n_th + 0.5) / (2.0 + gamma_e / gamma_m) - 0.5;
}

double background_model_eval(double p, const BackgroundModel& model)
{
    if (!(model.a_const >= 0.0)) {
        throw std::invalid_argument("background model: a_const must be >= 0");
    }
    return model.a_const + model.alpha * p;
}

CavityNoiseEstimate cavity_noise_from_background(double s_bg, double a_const, double eta)
{
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("cavity_noise_from_background: eta must lie in (0, 1]");
    }
    if (s_bg < a_const) {
        return {0.0, true};
    }
    return {(s_bg - a_const) / (4.0 * eta), false};
}

} // namespace cemech
