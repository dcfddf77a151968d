#pragma once

// Cavity susceptibilities and the quantities derived from them in the
// weak-coupling (adiabatically eliminated cavity) picture.

#include <complex>

#include "cemech/core.hpp"

namespace cemech {

/// a_plus/minus = 1 / (kappa/2 - i (delta +/- omega_m)), units of s.
struct Susceptibilities {
    std::complex<double> a_plus;
    std::complex<double> a_minus;
};

Susceptibilities susceptibilities(double delta, double omega_m, double kappa);

/// Mean intracavity photon number P kappa_ex / (hbar omega_p ((kappa/2)^2 + delta^2)),
/// with omega_p = omega_c + delta.
double intracavity_photons(const Drive& drive, const CavityParams& cav);

struct BackactionResult {
    double gamma_e = 0.0; // optical damping, negative on the blue side
    double omega_e = 0.0; // optical spring shift
    double gamma_eff = 0.0;
    double omega_eff = 0.0;
    /// gamma_e >= kappa / 10: outside the weak-coupling regime these
    /// formulas assume. The numbers are still returned.
    bool weak_coupling_violated = false;
};

/// gamma_e = -2 g^2 Re[a_minus* - a_plus], omega_e = -g^2 Im[a_minus* - a_plus].
BackactionResult backaction_rates(double g, double delta, double omega_m, double kappa,
                                  double gamma_m);

/// Field-enhanced coupling g = g0 sqrt(n).
double coupled_rate(double g0, double photons);

struct Cooperativities {
    double classical = 0.0; // C = gamma_e / gamma_m
    double quantum = 0.0;   // C_q = C / n_th
};

Cooperativities cooperativities(double gamma_e, double gamma_m, double n_th);

/// Empirical damping law gamma_eff(P) = gamma_m (1 + P / p0).
struct PumpModel {
    double gamma_m = 0.0; // rad/s
    double p0 = 0.0;      // W

    void validate() const;
};

double gamma_eff_of_power(double p, const PumpModel& model);

} // namespace cemech
