#pragma once

// Steady-state phonon occupation under sideband cooling, and the small
// sensitivity and stability budgets built on the same mode parameters.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cemech/backaction.hpp"
#include "cemech/core.hpp"

namespace cemech {

/// (gamma_m n_th + gamma_e n~) / (gamma_m + gamma_e).
double occupation_from_rates(double gamma_m, double gamma_e, double n_th, double n_tilde);

struct CoolingPoint {
    double power = 0.0;   // W
    double gamma_e = 0.0; // rad/s
    double n_tilde = 0.0;
    double n_bar = 0.0;
};

struct CoolingCurve {
    std::vector<CoolingPoint> points;
    std::size_t min_index = 0;
    double n_min = 0.0;
    double p_opt = 0.0; // W
};

/// Sweep with gamma_e = gamma_m P / p0 and n~(P) = noise_slope * P.
CoolingCurve cooling_curve(std::span<const double> powers, const PumpModel& pump, double n_th,
                           double noise_slope);

/// Continuous minimum of n(P) for the linear noise model: the optimal P / p0
/// and the minimal occupation. For large P*/p0 the minimum approaches
/// 2 sqrt(n_th c) with c = noise_slope * p0.
struct CoolingOptimum {
    double power_ratio = 0.0; // P* / p0
    double n_min = 0.0;
};

CoolingOptimum cooling_optimum(double n_th, double noise_per_p0);

/// Resonant thermal force noise sqrt(4 m gamma_m k_B T), single-sided, N/sqrt(Hz).
double force_noise_density(const MechanicalMode& mode, double temperature);

struct Transmissibility {
    double value = 0.0;
    bool at_resonance = false; // undamped and f == f0: unbounded
};

/// Corner frequency (1 / 2 pi) sqrt(k / m) of a mass-on-spring isolator, Hz.
double isolator_corner_frequency(double k_total, double mass);

/// Base-to-mass displacement transmissibility. With zero damping this is
/// f0^2 / |f0^2 - f^2|.
Transmissibility vibration_transmissibility(double f_hz, double k_total, double mass,
                                            double damping_ratio = 0.0);

struct DephasingBudget {
    double gamma_spectral = 0.0;
    double gamma_ringdown = 0.0;
    double excess_fraction = 0.0;    // (G_spec - G_rd) / G_spec
    double worst_case_fraction = 0.0; // with both rates pushed by 1 sigma
    std::vector<std::string> warnings;
};

DephasingBudget dephasing_budget(double gamma_spectral, double gamma_ringdown,
                                 double sigma_spectral = 0.0, double sigma_ringdown = 0.0);

} // namespace cemech
