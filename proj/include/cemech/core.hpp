#pragma once

// Physical constants, unit conventions and the parameter types shared by the
// rest of the library.
//
// Unit policy: every frequency or rate held in these types is angular (rad/s).
// Files, configs and reports use Hz, dBm and K; conversions happen only at
// those boundaries through the helpers below.

#include <numbers>
#include <optional>
#include <stdexcept>

namespace cemech {

/// CODATA 2018 exact / recommended values.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;      // J s
    static constexpr double k_B = 1.380649e-23;          // J / K
    static constexpr double epsilon0 = 8.8541878128e-12; // F / m
};

constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
constexpr double rad_to_hz(double omega) { return omega / two_pi; }

double dbm_to_watts(double p_dbm);
double watts_to_dbm(double p_w);
/// Power after `attenuation_db` of loss, both in dB units.
double attenuate_dbm(double p_dbm, double attenuation_db);

struct CavityParams {
    double omega_c = 0.0;  // rad/s
    double kappa = 0.0;    // total decay, rad/s
    double kappa_ex = 0.0; // external (out-coupling) decay, rad/s

    double eta() const { return kappa_ex / kappa; }
    double kappa_0() const { return kappa - kappa_ex; }
    void validate() const;
};

struct MechanicalMode {
    double omega_m = 0.0; // rad/s
    double gamma_m = 0.0; // energy decay, rad/s
    std::optional<double> mass; // kg

    void validate() const;
};

struct Drive {
    double power_at_device = 0.0; // W
    double detuning = 0.0;        // omega_p - omega_c, rad/s
    double attenuation_db = 0.0;  // source to device

    void validate() const;
};

struct Environment {
    double temperature = 0.0; // K

    void validate() const;
};

/// Bose-Einstein occupation (exp(hbar w / k_B T) - 1)^-1; exactly 0 at T = 0.
double thermal_occupation(double temperature, double omega);

struct CoherenceTime {
    bool infinite = false;         // T = 0: no thermal decoherence
    double seconds = 0.0;          // 1 / (n_th gamma_m), exact Bose factor
    double high_temperature = 0.0; // hbar Q / (k_B T)
    double n_th = 0.0;
    /// The two estimates agree within 0.1 % (only meaningful for n_th >> 1).
    bool estimates_agree = false;
};

CoherenceTime coherence_time(const MechanicalMode& mode, const Environment& env);

double quality_factor(const MechanicalMode& mode);

} // namespace cemech
