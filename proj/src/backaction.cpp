#include "cemech/backaction.hpp"

#include <cmath>
#include <stdexcept>

namespace cemech {

Susceptibilities susceptibilities(double delta, double omega_m, double kappa)
{
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("susceptibilities: kappa must be positive");
    }
    using namespace std::complex_literals;
    const double half = 0.5 * kappa;
    return {1.0 / (half - 1i * (delta + omega_m)), 1.0 / (half - 1i * (delta - omega_m))};
}

double intracavity_photons(const Drive& drive, const CavityParams& cav)
{
    drive.validate();
    cav.validate();
    const double omega_p = cav.omega_c + drive.detuning;
    const double half = 0.5 * cav.kappa;
    return drive.power_at_device * cav.kappa_ex /
           (PhysicalConstants::hbar * omega_p * (half * half + drive.detuning * drive.detuning));
}

BackactionResult backaction_rates(double g, double delta, double omega_m, double kappa,
                                  double gamma_m)
{
    if (!(g >= 0.0)) {
        throw std::invalid_argument("backaction_rates: g must be >= 0");
    }
    const auto chi = susceptibilities(delta, omega_m, kappa);
    const std::complex<double> diff = std::conj(chi.a_minus) - chi.a_plus;
    BackactionResult r;
    r.gamma_e = -2.0 * g * g * diff.real();
    r.omega_e = -g * g * diff.imag();
    r.gamma_eff = gamma_m + r.gamma_e;
    r.omega_eff = omega_m + r.omega_e;
    r.weak_coupling_violated = std::abs(r.gamma_e) >= 0.1 * kappa;
    return r;
}

double coupled_rate(double g0, double photons)
{
    if (!(photons >= 0.0)) {
        throw std::invalid_argument("coupled_rate: photon number must be >= 0");
    }
    return g0 * std::sqrt(photons);
}

Cooperativities cooperativities(double gamma_e, double gamma_m, double n_th)
{
    if (!(gamma_e > 0.0) || !(gamma_m > 0.0) || !(n_th > 0.0)) {
        throw std::invalid_argument("cooperativities: rates and n_th must be positive");
    }
    const double c = gamma_e / gamma_m;
    return {c, c / n_th};
}

void PumpModel::validate() const
{
    if (!(gamma_m > 0.0) || !(p0 > 0.0)) {
        throw std::invalid_argument("pump model: gamma_m and p0 must be positive");
    }
}

double gamma_eff_of_power(double p, const PumpModel& model)
{
    model.validate();
    if (!(p >= 0.0)) {
        throw std::invalid_argument("gamma_eff_of_power: power must be >= 0");
    }
    return model.gamma_m * (1.0 + p / model.p0);
}

} // namespace cemech
