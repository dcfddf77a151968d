#include "cemech/core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cemech {

namespace {

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

} // namespace

double dbm_to_watts(double p_dbm)
{
    require_finite(p_dbm, "power in dBm");
    return 1e-3 * std::pow(10.0, p_dbm / 10.0);
}

double watts_to_dbm(double p_w)
{
    require_finite(p_w, "power in W");
    if (p_w <= 0.0) {
        throw std::invalid_argument("power in W must be positive to express in dBm");
    }
    return 10.0 * std::log10(p_w / 1e-3);
}

double attenuate_dbm(double p_dbm, double attenuation_db)
{
    require_finite(p_dbm, "power in dBm");
    require_finite(attenuation_db, "attenuation");
    return p_dbm - attenuation_db;
}

void CavityParams::validate() const
{
    if (!(omega_c > 0.0) || !(kappa > 0.0) || !(kappa_ex > 0.0)) {
        throw std::invalid_argument("cavity: omega_c, kappa and kappa_ex must be strictly positive");
    }
    if (kappa_ex > kappa) {
        throw std::invalid_argument("cavity: kappa_ex cannot exceed kappa");
    }
}

void MechanicalMode::validate() const
{
    if (!(omega_m > 0.0) || !(gamma_m > 0.0) || !std::isfinite(omega_m) || !std::isfinite(gamma_m)) {
        throw std::invalid_argument("mechanics: omega_m and gamma_m must be finite and positive");
    }
    if (mass && !(*mass > 0.0)) {
        throw std::invalid_argument("mechanics: mass must be positive when given");
    }
}

void Drive::validate() const
{
    if (!(power_at_device >= 0.0)) {
        throw std::invalid_argument("drive: power must be non-negative");
    }
    if (!(attenuation_db >= 0.0)) {
        throw std::invalid_argument("drive: attenuation must be non-negative");
    }
    require_finite(detuning, "drive detuning");
}

void Environment::validate() const
{
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("environment: temperature must be finite and >= 0");
    }
}

double thermal_occupation(double temperature, double omega)
{
    if (!(omega > 0.0)) {
        throw std::invalid_argument("thermal_occupation: omega must be positive");
    }
    if (!(temperature >= 0.0)) {
        throw std::invalid_argument("thermal_occupation: temperature must be >= 0");
    }
    if (temperature == 0.0) {
        return 0.0;
    }
    const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::k_B * temperature);
    return 1.0 / std::expm1(x);
}

CoherenceTime coherence_time(const MechanicalMode& mode, const Environment& env)
{
    mode.validate();
    env.validate();
    CoherenceTime out;
    if (env.temperature == 0.0) {
        out.infinite = true;
        out.seconds = std::numeric_limits<double>::infinity();
        out.high_temperature = std::numeric_limits<double>::infinity();
        out.estimates_agree = true;
        return out;
    }
    out.n_th = thermal_occupation(env.temperature, mode.omega_m);
    out.seconds = 1.0 / (out.n_th * mode.gamma_m);
    out.high_temperature =
        PhysicalConstants::hbar * quality_factor(mode) / (PhysicalConstants::k_B * env.temperature);
    out.estimates_agree = std::abs(out.seconds - out.high_temperature) <= 1e-3 * out.seconds;
    return out;
}

double quality_factor(const MechanicalMode& mode)
{
    mode.validate();
    return mode.omega_m / mode.gamma_m;
}

} // namespace cemech
