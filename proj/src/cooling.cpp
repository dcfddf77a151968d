#include "cemech/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cemech {

double occupation_from_rates(double gamma_m, double gamma_e, double n_th, double n_tilde)
{
    if (!(gamma_m > 0.0) || !(gamma_e >= 0.0)) {
        throw std::invalid_argument("occupation_from_rates: need gamma_m > 0 and gamma_e >= 0");
    }
    return (gamma_m * n_th + gamma_e * n_tilde) / (gamma_m + gamma_e);
}

CoolingCurve cooling_curve(std::span<const double> powers, const PumpModel& pump, double n_th,
                           double noise_slope)
{
    pump.validate();
    if (powers.empty()) {
        throw std::invalid_argument("cooling_curve: empty power sweep");
    }
    if (!(noise_slope >= 0.0) || !(n_th >= 0.0)) {
        throw std::invalid_argument("cooling_curve: n_th and noise slope must be >= 0");
    }
    CoolingCurve curve;
    curve.points.reserve(powers.size());
    curve.n_min = std::numeric_limits<double>::infinity();
    for (double p : powers) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("cooling_curve: powers must be >= 0");
        }
        CoolingPoint pt;
        pt.power = p;
        pt.gamma_e = pump.gamma_m * p / pump.p0;
        pt.n_tilde = noise_slope * p;
        pt.n_bar = occupation_from_rates(pump.gamma_m, pt.gamma_e, n_th, pt.n_tilde);
        if (pt.n_bar < curve.n_min) {
            curve.n_min = pt.n_bar;
            curve.min_index = curve.points.size();
            curve.p_opt = p;
        }
        curve.points.push_back(pt);
    }
    return curve;
}

CoolingOptimum cooling_optimum(double n_th, double noise_per_p0)
{
    if (!(n_th >= 0.0) || !(noise_per_p0 > 0.0)) {
        throw std::invalid_argument("cooling_optimum: need n_th >= 0 and a positive noise slope");
    }
    // n(x) = (n_th + c x^2) / (1 + x); stationary at c x^2 + 2 c x - n_th = 0.
    const double c = noise_per_p0;
    const double x = std::sqrt(1.0 + n_th / c) - 1.0;
    return {x, 2.0 * c * x};
}

double force_noise_density(const MechanicalMode& mode, double temperature)
{
    mode.validate();
    if (!mode.mass) {
        throw std::invalid_argument("force_noise_density: mode mass is required");
    }
    if (!(temperature >= 0.0)) {
        throw std::invalid_argument("force_noise_density: temperature must be >= 0");
    }
    return std::sqrt(4.0 * *mode.mass * mode.gamma_m * PhysicalConstants::k_B * temperature);
}

double isolator_corner_frequency(double k_total, double mass)
{
    if (!(k_total > 0.0) || !(mass > 0.0)) {
        throw std::invalid_argument("isolator: spring constant and mass must be positive");
    }
    return std::sqrt(k_total / mass) / two_pi;
}

Transmissibility vibration_transmissibility(double f_hz, double k_total, double mass,
                                            double damping_ratio)
{
    if (!(f_hz >= 0.0) || !(damping_ratio >= 0.0)) {
        throw std::invalid_argument("vibration_transmissibility: need f >= 0 and damping >= 0");
    }
    const double f0 = isolator_corner_frequency(k_total, mass);
    const double r = f_hz / f0;
    const double one_minus = 1.0 - r * r;
    const double damp = 2.0 * damping_ratio * r;
    if (damping_ratio == 0.0) {
        if (one_minus == 0.0) {
            return {std::numeric_limits<double>::infinity(), true};
        }
        return {1.0 / std::abs(one_minus), false};
    }
    return {std::sqrt((1.0 + damp * damp) / (one_minus * one_minus + damp * damp)), false};
}

DephasingBudget dephasing_budget(double gamma_spectral, double gamma_ringdown,
                                 double sigma_spectral, double sigma_ringdown)
{
    if (!(gamma_spectral > 0.0) || !(gamma_ringdown > 0.0)) {
        throw std::invalid_argument("dephasing_budget: rates must be positive");
    }
    if (!(sigma_spectral >= 0.0) || !(sigma_ringdown >= 0.0)) {
        throw std::invalid_argument("dephasing_budget: uncertainties must be >= 0");
    }
    DephasingBudget b;
    b.gamma_spectral = gamma_spectral;
    b.gamma_ringdown = gamma_ringdown;
    if (gamma_spectral < gamma_ringdown) {
        b.warnings.emplace_back(
            "spectral linewidth below energy decay rate: inconsistent, excess fraction set to 0");
        b.excess_fraction = 0.0;
    } else {
        b.excess_fraction = (gamma_spectral - gamma_ringdown) / gamma_spectral;
    }
    const double spec_hi = gamma_spectral + sigma_spectral;
    const double rd_lo = std::max(0.0, gamma_ringdown - sigma_ringdown);
    b.worst_case_fraction = std::clamp((spec_hi - rd_lo) / spec_hi, 0.0, 1.0);
    return b;
}

} // namespace cemech
