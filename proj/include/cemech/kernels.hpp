#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the two produce
// bit-identical output (pointwise work only, reductions in a fixed order).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cemech::kernels {

/// Precomputed constants of the resolved-sideband spectrum.
struct RwaCoefficients {
    double floor = 0.0;      // n_add + 4 eta (n~ + 1/2)
    double numerator = 0.0;  // eta G_m G_e [bracket]
    double half_width = 0.0; // G_eff / 2
    double center = 0.0;     // W_eff, rad/s
};

inline double rwa_value(const RwaCoefficients& c, double omega)
{
    const double x = omega - c.center;
    return c.floor + c.numerator / (c.half_width * c.half_width + x * x);
}

/// Precomputed constants of the general spectrum.
struct FullCoefficients {
    double shot_prefactor = 0.0;  // eta kappa^2 (n~ + 1/2)
    double cavity_half = 0.0;     // kappa / 2
    double delta = 0.0;
    double mech_prefactor = 0.0;  // g^2 kappa_ex A2 [G_m (n+1/2) + g^2 kappa A2 (n~+1/2)]
    double cross_prefactor = 0.0; // g^2 kappa^2 eta G_eff Re[a_- - a_+*] A2 (n~ + 1/2)
    double mech_half = 0.0;       // G_eff / 2
    double omega_eff = 0.0;
    double n_add = 0.0;
};

struct FullTerms {
    double shot;
    double mech;
    double cross;
};

inline FullTerms full_terms(const FullCoefficients& c, double omega)
{
    auto lor = [](double x, double h) { return 1.0 / (h * h + x * x); };
    const double cav = lor(omega - c.delta, c.cavity_half) + lor(omega + c.delta, c.cavity_half);
    const double mech = lor(omega - c.omega_eff, c.mech_half) + lor(omega + c.omega_eff, c.mech_half);
    return {c.shot_prefactor * cav, c.mech_prefactor * mech, c.cross_prefactor * mech};
}

inline double full_value(const FullCoefficients& c, double omega)
{
    const FullTerms t = full_terms(c, omega);
    return t.shot + t.mech + t.cross + c.n_add;
}

enum class Window { rectangular, hann };

std::vector<double> window_coefficients(Window window, std::size_t n);

/// Sum over segments of |FFT(w * x[start : start + n])|^2, in natural FFT bin
/// order (DC first). Segments are summed in the order of `starts`.
struct PeriodogramRequest {
    std::span<const std::complex<double>> samples;
    std::span<const std::size_t> starts;
    std::span<const double> window;
};

namespace serial {
void evaluate_rwa(const RwaCoefficients& c, std::span<const double> freqs_hz, std::span<double> out);
void evaluate_full(const FullCoefficients& c, std::span<const double> freqs_hz, std::span<double> out);
std::vector<double> periodogram_sum(const PeriodogramRequest& req);
} // namespace serial

namespace omp {
void evaluate_rwa(const RwaCoefficients& c, std::span<const double> freqs_hz, std::span<double> out);
void evaluate_full(const FullCoefficients& c, std::span<const double> freqs_hz, std::span<double> out);
std::vector<double> periodogram_sum(const PeriodogramRequest& req);
} // namespace omp

/// Number of OpenMP worker threads available (1 without OpenMP).
int max_threads();

} // namespace cemech::kernels
