#pragma once

// Nonlinear least squares and the calibration fits built on it.
//
// All wrappers report parameters in SI units with angular rates (rad/s),
// except where a name says otherwise. Every wrapper derives its own starting
// point from the data.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cemech/fit_report.hpp"
#include "cemech/spectrum.hpp"
#include "cemech/timedomain.hpp"

namespace cemech {

// ---------------------------------------------------------------------------
// Engine

/// Fills `residuals` (already divided by their standard deviations).
using ResidualFunction = std::function<void(std::span<const double> params, std::span<double> residuals)>;

struct NllsProblem {
    std::size_t n_residuals = 0;
    ResidualFunction residuals;
    std::vector<std::string> names;
    std::vector<double> initial;
};

struct NllsOptions {
    double cost_tolerance = 1e-10;     // relative cost change
    double gradient_tolerance = 1e-12; // max |J^T r|
    int max_iterations = 500;
    double initial_lambda = 1e-3;
    /// Scale the covariance by the residual variance (chi^2 / dof).
    bool scale_covariance = true;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling and central-difference
/// Jacobians. A rank-deficient Jacobian stops the fit with converged = false
/// and names the parameters that cannot be identified.
FitReport nlls_solve(const NllsProblem& problem, const NllsOptions& options = {});

using CurveModel = std::function<double(double x, std::span<const double> params)>;

/// Curve fit of y = model(x; p). Empty sigma means unit weights.
/// Requires more points than parameters.
FitReport nlls_fit(const CurveModel& model, std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma, std::vector<std::string> names,
                   std::vector<double> initial, const NllsOptions& options = {});

/// Maps a report to new parameters p = map(u) with the delta method.
FitReport reparametrize(const FitReport& internal, std::vector<std::string> names,
                        const std::function<std::vector<double>(std::span<const double>)>& map);

/// Two-sided interval value +/- t_{dof} * std_error at the given level.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double v) const { return v >= lower && v <= upper; }
};

Interval confidence_interval(const FitReport& report, std::string_view name, double level = 0.95);

// ---------------------------------------------------------------------------
// Linear

/// Weighted straight line, closed form. Parameters {slope, intercept}.
FitReport fit_affine(std::span<const double> x, std::span<const double> y,
                     std::span<const double> sigma = {});

// ---------------------------------------------------------------------------
// Spectral line

struct LorentzianOptions {
    std::vector<double> sigma; // optional per-point errors
    std::size_t min_points_across = 8;
};

/// offset + (area / pi) (fwhm / 2) / ((f - center)^2 + (fwhm / 2)^2).
/// Parameters {center, fwhm, area, offset}; area may be negative.
FitReport fit_lorentzian(const SpectrumTrace& trace, const LorentzianOptions& options = {});

// ---------------------------------------------------------------------------
// Ringdowns

enum class DecayWeighting {
    additive, // constant noise on the energy: log-space weights E^2
    relative, // constant fractional noise: uniform log-space weights
};

struct ExponentialOptions {
    DecayWeighting weighting = DecayWeighting::additive;
    /// Samples after the first one below snr_threshold * noise floor are
    /// dropped. The floor is estimated from second differences of the trace.
    double snr_threshold = 5.0;
};

/// A exp(-gamma (t - t0)) fitted in log space. Parameters {gamma, amplitude};
/// constant t_ref is the time the amplitude refers to.
FitReport fit_exponential_decay(const TimeTrace& energy_trace, const ExponentialOptions& options = {});

// ---------------------------------------------------------------------------
// Backaction calibration

struct PowerRatePoint {
    double power = 0.0;     // W at the device
    double gamma_eff = 0.0; // rad/s
    double sigma = 0.0;     // rad/s; 0 means "use relative weights"
};

/// gamma_eff = gamma_m (1 + P / p0). Parameters {gamma_m, p0}.
FitReport fit_gamma_vs_power(std::span<const PowerRatePoint> points);

// ---------------------------------------------------------------------------
// Cavity reflection

struct S11Trace {
    std::vector<double> frequencies_hz; // absolute
    std::vector<std::complex<double>> values;
};

struct S11Options {
    bool magnitude_only = false;
    /// Resolves the kappa_ex <-> kappa - kappa_ex ambiguity of |S11|.
    std::optional<bool> overcoupled_hint;
};

/// S11 = G (1 - kappa_ex / (i (w - w_c) + kappa / 2)) with complex gain G.
/// Parameters {omega_c, kappa, kappa_ex, eta, gain_abs, gain_phase}.
FitReport fit_s11(const S11Trace& trace, const S11Options& options = {});

/// Model evaluation used by the fit and by tests.
std::complex<double> s11_model(double omega, double omega_c, double kappa, double kappa_ex,
                               std::complex<double> gain = {1.0, 0.0});

// ---------------------------------------------------------------------------
// Thermal anchoring

struct ThermalPoint {
    double temperature = 0.0; // K
    double area = 0.0;        // mechanical sideband area, any consistent unit
    double correction = 1.0;  // gamma_eff / gamma_m at that point
    double sigma = 0.0;       // error on area, 0 for unit weights
};

struct CalibrationConstant {
    double quanta_per_area = 0.0;
    double valid_above = 0.0;        // K
    double bath_extrapolation = 0.0; // K, from the base-temperature point
};

struct ThresholdOptions {
    double threshold = 0.2; // K; thermalization is only trusted above this
    bool include_below = false;
    /// Index of the base-temperature point; default is the coldest point.
    std::optional<std::size_t> base_index;
};

struct ThermalCalibration {
    CalibrationConstant constant;
    FitReport fit; // {area_per_quantum, quanta_per_area}
    double base_occupation = 0.0;
};

ThermalCalibration thermal_calibration(std::span<const ThermalPoint> points, double omega_m,
                                       const ThresholdOptions& options = {});

/// Inverse Bose factor: the temperature at which omega has occupation n.
double temperature_from_occupation(double n, double omega);

struct RatioPoint {
    double temperature = 0.0;
    double ratio = 0.0; // mechanical / calibration peak area, backaction-corrected
    double sigma = 0.0;
};

/// g0^2 = (pm_depth^2 omega_mod^2 / 4) * dR/dn_th. Parameters {g0, ratio_per_quantum}.
FitReport gorodetsky_g0(std::span<const RatioPoint> points, double pm_depth, double omega_mod,
                        double omega_m, const ThresholdOptions& options = {});

/// Ratio a thermal mode of coupling g0 produces against a calibration tone.
double gorodetsky_ratio(double g0, double n_th, double pm_depth, double omega_mod);

// ---------------------------------------------------------------------------
// Two-level-system damping

struct RatePoint {
    double temperature = 0.0;
    double gamma = 0.0;
};

/// gamma = gamma_ref (T / t_ref)^alpha, fitted in log-log space.
/// t_ref defaults to the geometric mean temperature.
FitReport fit_tls_power_law(std::span<const RatePoint> points,
                            std::optional<double> reference_temperature = std::nullopt);

} // namespace cemech
