#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cemech/core.hpp"
#include "cemech/estimate.hpp"

namespace cemech {

namespace {

using cplx = std::complex<double>;

FitReport failed_report(std::vector<std::string> names, std::string why, FitReport base = {})
{
    base.names = std::move(names);
    base.converged = false;
    base.stop_reason = "failed";
    base.diagnostics.push_back(std::move(why));
    const auto n = base.names.size();
    if (base.values.size() != n) {
        base.values.assign(n, std::numeric_limits<double>::quiet_NaN());
        base.std_errors = base.values;
        base.covariance = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                                    std::numeric_limits<double>::quiet_NaN());
    }
    return base;
}

/// Proportional fit y = s x with closed-form variance (scaled by chi^2/dof).
struct Proportional {
    double slope = 0.0;
    double variance = 0.0;
    double chi2 = 0.0;
    std::size_t dof = 0;
};

Proportional fit_proportional(std::span<const double> x, std::span<const double> y, std::span<const double> sigma)
{
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = sigma.empty() || sigma[i] == 0.0 ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    Proportional out;
    out.slope = sxy / sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sd = sigma.empty() || sigma[i] == 0.0 ? 1.0 : sigma[i];
        const double r = (y[i] - out.slope * x[i]) / sd;
        out.chi2 += r * r;
    }
    out.dof = x.size() - 1;
    out.variance = (out.dof > 0 ? out.chi2 / static_cast<double>(out.dof) : 1.0) / sxx;
    return out;
}

/// Points at or above the threshold, or all of them when asked to.
std::vector<std::size_t> select_thermalized(std::span<const double> temps, const ThresholdOptions& opts,
                                            std::vector<std::string>& warnings)
{
    std::vector<std::size_t> idx;
    std::size_t below = 0;
    for (std::size_t i = 0; i < temps.size(); ++i) {
        if (temps[i] >= opts.threshold) {
            idx.push_back(i);
        } else {
            ++below;
            if (opts.include_below) {
                idx.push_back(i);
            }
        }
    }
    if (below > 0) {
        warnings.push_back(std::to_string(below) + " point(s) below " + std::to_string(opts.threshold) + " K " +
                           (opts.include_below ? "included on request" : "excluded from the fit"));
    }
    return idx;
}

// Circle through a set of complex points, algebraic (Kasa) least squares.
struct Circle {
    cplx center;
    double radius = 0.0;
};

Circle kasa_circle(std::span<const cplx> z)
{
    Eigen::MatrixXd a(static_cast<Eigen::Index>(z.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        a(r, 0) = z[i].real();
        a(r, 1) = z[i].imag();
        a(r, 2) = 1.0;
        b(r) = -std::norm(z[i]);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    Circle out;
    out.center = {-0.5 * c(0), -0.5 * c(1)};
    out.radius = std::sqrt(std::max(0.0, std::norm(out.center) - c(2)));
    return out;
}

} // namespace

FitReport fit_gamma_vs_power(std::span<const PowerRatePoint> points)
{
    if (points.size() < 3) {
        throw std::invalid_argument("fit_gamma_vs_power: need at least 3 points");
    }
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = 0.0;
    for (const auto& p : points) {
        if (!(p.power >= 0.0) || !std::isfinite(p.power) || !std::isfinite(p.gamma_eff) || p.sigma < 0.0) {
            throw std::invalid_argument("fit_gamma_vs_power: powers must be non-negative, values finite");
        }
        if (p.sigma == 0.0 && !(p.gamma_eff > 0.0)) {
            throw std::invalid_argument("fit_gamma_vs_power: relative weights need positive rates");
        }
        if (p.power > 0.0) {
            pmin = std::min(pmin, p.power);
        }
        pmax = std::max(pmax, p.power);
    }
    if (!(pmax >= 10.0 * pmin)) {
        throw std::invalid_argument("fit_gamma_vs_power: powers must span at least one decade");
    }

    // The model is affine in P: gamma_m + (gamma_m / p0) P. Fit in P / pmax.
    std::vector<double> x, y, s;
    for (const auto& p : points) {
        x.push_back(p.power / pmax);
        y.push_back(p.gamma_eff);
        s.push_back(p.sigma > 0.0 ? p.sigma : p.gamma_eff);
    }
    const FitReport line = fit_affine(x, y, s);
    if (!line.converged) {
        return failed_report({"gamma_m", "p0"}, "affine fit failed", line);
    }
    FitReport rep = reparametrize(line, {"gamma_m", "p0"}, [&](std::span<const double> p) {
        return std::vector<double>{p[1], pmax * p[1] / p[0]};
    });
    if (!(line.values[1] > 0.0)) {
        rep.converged = false;
        rep.stop_reason = "non-physical";
        rep.diagnostics.push_back("fitted intrinsic rate gamma_m is not positive");
    }
    if (!(line.values[0] > 0.0)) {
        rep.converged = false;
        rep.stop_reason = "non-physical";
        rep.diagnostics.push_back("rate does not grow with power: corner power p0 is not positive");
    }
    return rep;
}

cplx s11_model(double omega, double omega_c, double kappa, double kappa_ex, cplx gain)
{
    return gain * (1.0 - kappa_ex / (cplx(0.0, omega - omega_c) + 0.5 * kappa));
}

FitReport fit_s11(const S11Trace& trace, const S11Options& options)
{
    const auto& f = trace.frequencies_hz;
    const std::size_t n = f.size();
    if (trace.values.size() != n) {
        throw std::invalid_argument("fit_s11: frequency and value lengths differ");
    }
    if (n < 8) {
        throw std::invalid_argument("fit_s11: need at least 8 points");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(f[i]) || !std::isfinite(trace.values[i].real()) || !std::isfinite(trace.values[i].imag())) {
            throw std::invalid_argument("fit_s11: non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(f[i] > f[i - 1])) {
            throw std::invalid_argument("fit_s11: frequencies must be strictly increasing");
        }
    }
    const auto& z = trace.values;
    const double span = f.back() - f.front();

    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = std::abs(z[i]);
    }

    if (options.magnitude_only) {
        // |S|^2 / |G|^2 = (d^2 + q) / (d^2 + h^2), h = kappa / 2, q = (h - kappa_ex)^2.
        const auto imin = static_cast<std::size_t>(std::min_element(mag.begin(), mag.end()) - mag.begin());
        const double g0 = std::max(mag.front(), mag.back());
        const double level = 0.5 * (g0 * g0 + mag[imin] * mag[imin]);
        std::size_t lo = imin, hi = imin;
        while (lo > 0 && mag[lo] * mag[lo] < level) {
            --lo;
        }
        while (hi + 1 < n && mag[hi] * mag[hi] < level) {
            ++hi;
        }
        const double k0 = std::max(f[hi] - f[lo], span / static_cast<double>(n));
        const double fref = f[imin];
        const double depth = mag[imin] / g0;
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = (f[i] - fref) / k0;
        }
        const CurveModel model = [](double x, std::span<const double> p) {
            const double d = x - p[0];
            const double h = 0.5 * p[1];
            return std::abs(p[3]) * std::sqrt(std::max(0.0, d * d + p[2]) / (d * d + h * h));
        };
        const double q0 = std::pow(depth * 0.5, 2);
        FitReport internal = nlls_fit(model, u, mag, {}, {"c", "k", "q", "g"}, {0.0, 1.0, q0, g0});
        const bool over = options.overcoupled_hint.value_or(true);
        FitReport rep = reparametrize(
            internal, {"omega_c", "kappa", "kappa_ex", "eta", "gain_abs"}, [&](std::span<const double> p) {
                const double k = std::abs(p[1]);
                const double dq = std::sqrt(std::max(0.0, p[2]));
                const double ke = over ? 0.5 * k + dq : 0.5 * k - dq;
                return std::vector<double>{two_pi * (fref + k0 * p[0]), two_pi * k0 * k, two_pi * k0 * ke, ke / k,
                                           std::abs(p[3])};
            });
        rep.constants["magnitude_only"] = 1.0;
        rep.warnings.push_back("magnitude-only fit: degraded precision, gain phase unavailable");
        if (!options.overcoupled_hint) {
            rep.warnings.push_back("coupling branch ambiguous without a hint; assumed overcoupled");
        }
        return rep;
    }

    // Complex trace: the response is a circle through the off-resonant gain G.
    const Circle circ = kasa_circle(z);
    const cplx a = (z.front() - circ.center) / std::abs(z.front() - circ.center);
    const cplx b = (z.back() - circ.center) / std::abs(z.back() - circ.center);
    cplx dir = a + b;
    dir = std::abs(dir) > 1e-12 ? dir / std::abs(dir) : a;
    const cplx gain0 = circ.center + circ.radius * dir;
    const double eta0 = std::clamp(circ.radius / std::abs(gain0), 0.05, 1.0);

    // arg(1 - S/G) = -atan(2 (f - f_c) / k): tan of it is linear in f.
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
        const double th = std::arg(1.0 - z[i] / gain0);
        if (std::abs(th) < 1.2) {
            xs.push_back(f[i]);
            ys.push_back(std::tan(th));
        }
    }
    double fc0 = f[static_cast<std::size_t>(std::min_element(mag.begin(), mag.end()) - mag.begin())];
    double k0 = span / 10.0;
    if (xs.size() >= 3) {
        const double xm = xs[xs.size() / 2];
        for (double& x : xs) {
            x -= xm;
        }
        const FitReport line = fit_affine(xs, ys);
        if (line.converged && line.values[0] < 0.0) {
            k0 = -2.0 / line.values[0];
            fc0 = xm + line.values[1] * k0 / 2.0;
        }
    }
    const double fref = fc0;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (f[i] - fref) / k0;
    }
    NllsProblem prob;
    prob.n_residuals = 2 * n;
    prob.names = {"c", "k", "ke", "gr", "gi"};
    prob.initial = {0.0, 1.0, eta0, gain0.real(), gain0.imag()};
    prob.residuals = [&](std::span<const double> p, std::span<double> r) {
        const cplx g(p[3], p[4]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx m = g * (1.0 - p[2] / (cplx(0.0, u[i] - p[0]) + 0.5 * p[1]));
            r[2 * i] = m.real() - z[i].real();
            r[2 * i + 1] = m.imag() - z[i].imag();
        }
    };
    const FitReport internal = nlls_solve(prob);
    FitReport rep = reparametrize(internal, {"omega_c", "kappa", "kappa_ex", "eta", "gain_abs", "gain_phase"},
                                  [&](std::span<const double> p) {
                                      const cplx g(p[3], p[4]);
                                      return std::vector<double>{two_pi * (fref + k0 * p[0]), two_pi * k0 * p[1],
                                                                 two_pi * k0 * p[2], p[2] / p[1], std::abs(g),
                                                                 std::arg(g)};
                                  });
    if (rep.converged) {
        const double kappa_hz = rep.value("kappa") / two_pi;
        if (span < 3.0 * kappa_hz) {
            rep.warnings.push_back("trace spans less than 3 linewidths");
        }
        if (!(rep.value("kappa") > 0.0) || !(rep.value("kappa_ex") > 0.0)) {
            rep.converged = false;
            rep.stop_reason = "non-physical";
            rep.diagnostics.push_back("fitted kappa or kappa_ex is not positive");
        } else if (rep.value("eta") > 1.0) {
            rep.warnings.push_back("fitted kappa_ex exceeds kappa");
        }
    }
    return rep;
}

double temperature_from_occupation(double n, double omega)
{
    if (!(omega > 0.0)) {
        throw std::invalid_argument("temperature_from_occupation: omega must be positive");
    }
    if (!(n >= 0.0)) {
        throw std::invalid_argument("temperature_from_occupation: occupation must be non-negative");
    }
    if (n == 0.0) {
        return 0.0;
    }
    return PhysicalConstants::hbar * omega / (PhysicalConstants::k_B * std::log1p(1.0 / n));
}

ThermalCalibration thermal_calibration(std::span<const ThermalPoint> points, double omega_m,
                                       const ThresholdOptions& options)
{
    if (!(omega_m > 0.0)) {
        throw std::invalid_argument("thermal_calibration: omega_m must be positive");
    }
    std::vector<double> temps;
    for (const auto& p : points) {
        if (!(p.temperature >= 0.0) || !std::isfinite(p.area) || !(p.correction > 0.0) || p.sigma < 0.0) {
            throw std::invalid_argument("thermal_calibration: invalid point (T >= 0, finite area, correction > 0)");
        }
        temps.push_back(p.temperature);
    }
    ThermalCalibration out;
    std::vector<std::string> warnings;
    const auto idx = select_thermalized(temps, options, warnings);
    std::size_t above = 0;
    for (auto i : idx) {
        above += points[i].temperature >= options.threshold ? 1 : 0;
    }
    if (above < 3) {
        throw std::invalid_argument("thermal_calibration: need at least 3 points above " +
                                    std::to_string(options.threshold) + " K, got " + std::to_string(above));
    }

    // Corrected area = area * (gamma_eff / gamma_m) is proportional to n_th(T).
    std::vector<double> x, y, s;
    for (auto i : idx) {
        const auto& p = points[i];
        x.push_back(thermal_occupation(p.temperature, omega_m));
        y.push_back(p.area * p.correction);
        s.push_back(p.sigma * p.correction);
    }
    const bool weighted = std::all_of(s.begin(), s.end(), [](double v) { return v > 0.0; });
    const Proportional fit = fit_proportional(x, y, weighted ? std::span<const double>(s) : std::span<const double>{});

    FitReport& rep = out.fit;
    rep.names = {"area_per_quantum", "quanta_per_area"};
    rep.n_points = x.size();
    rep.dof = fit.dof;
    rep.residual_rms = std::sqrt(fit.chi2 / static_cast<double>(x.size()));
    rep.stop_reason = "closed form";
    rep.warnings = warnings;
    rep.constants["threshold_k"] = options.threshold;
    const double sd = std::sqrt(fit.variance);
    const double inv = 1.0 / fit.slope;
    const double dinv = inv * inv; // d(1/s)/ds magnitude
    rep.values = {fit.slope, inv};
    rep.std_errors = {sd, dinv * sd};
    rep.covariance.resize(2, 2);
    rep.covariance << fit.variance, -dinv * fit.variance, -dinv * fit.variance, dinv * dinv * fit.variance;
    rep.converged = fit.slope > 0.0 && std::isfinite(fit.slope);
    if (!rep.converged) {
        rep.stop_reason = "non-physical";
        rep.diagnostics.push_back("area does not grow with thermal occupation (slope <= 0)");
        return out;
    }

    out.constant.quanta_per_area = inv;
    out.constant.valid_above = options.threshold;
    std::size_t base = 0;
    if (options.base_index) {
        if (*options.base_index >= points.size()) {
            throw std::invalid_argument("thermal_calibration: base index out of range");
        }
        base = *options.base_index;
    } else {
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].temperature < points[base].temperature) {
                base = i;
            }
        }
    }
    out.base_occupation = points[base].area * points[base].correction * inv;
    if (out.base_occupation > 0.0) {
        out.constant.bath_extrapolation = temperature_from_occupation(out.base_occupation, omega_m);
    } else {
        rep.warnings.push_back("base-point area is not positive: no bath temperature extrapolated");
    }
    rep.constants["base_temperature_k"] = points[base].temperature;
    return out;
}

double gorodetsky_ratio(double g0, double n_th, double pm_depth, double omega_mod)
{
    if (!(pm_depth > 0.0) || !(omega_mod > 0.0)) {
        throw std::invalid_argument("gorodetsky_ratio: modulation depth and frequency must be positive");
    }
    return 4.0 * g0 * g0 * n_th / (pm_depth * pm_depth * omega_mod * omega_mod);
}

FitReport gorodetsky_g0(std::span<const RatioPoint> points, double pm_depth, double omega_mod, double omega_m,
                        const ThresholdOptions& options)
{
    if (!(pm_depth > 0.0) || !(omega_mod > 0.0) || !(omega_m > 0.0)) {
        throw std::invalid_argument("gorodetsky_g0: modulation depth, omega_mod and omega_m must be positive");
    }
    std::vector<double> temps;
    for (const auto& p : points) {
        if (!(p.temperature > 0.0) || !std::isfinite(p.ratio) || p.sigma < 0.0) {
            throw std::invalid_argument("gorodetsky_g0: invalid point (T > 0, finite ratio)");
        }
        temps.push_back(p.temperature);
    }
    std::vector<std::string> warnings;
    const auto idx = select_thermalized(temps, options, warnings);
    if (idx.size() < 2) {
        throw std::invalid_argument("gorodetsky_g0: need at least 2 thermalized points");
    }
    std::vector<double> x, y, s;
    for (auto i : idx) {
        x.push_back(thermal_occupation(points[i].temperature, omega_m));
        y.push_back(points[i].ratio);
        s.push_back(points[i].sigma);
    }
    const bool weighted = std::all_of(s.begin(), s.end(), [](double v) { return v > 0.0; });
    const Proportional fit = fit_proportional(x, y, weighted ? std::span<const double>(s) : std::span<const double>{});

    FitReport rep;
    rep.names = {"g0", "ratio_per_quantum"};
    rep.n_points = x.size();
    rep.dof = fit.dof;
    rep.residual_rms = std::sqrt(fit.chi2 / static_cast<double>(x.size()));
    rep.stop_reason = "closed form";
    rep.warnings = warnings;
    rep.constants["pm_depth_rad"] = pm_depth;
    rep.constants["omega_mod"] = omega_mod;
    const double k = 0.25 * pm_depth * pm_depth * omega_mod * omega_mod;
    const double sd = std::sqrt(fit.variance);
    if (fit.slope < 0.0) {
        rep.converged = false;
        rep.stop_reason = "non-physical";
        rep.diagnostics.push_back("ratio decreases with thermal occupation: negative slope");
        rep.values = {std::nan(""), fit.slope};
        rep.std_errors = {std::nan(""), sd};
        rep.covariance = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
        return rep;
    }
    const double g0 = std::sqrt(k * fit.slope);
    // dg0/ds = k / (2 g0); at g0 = 0 the error is quoted as sqrt(k sd).
    const double dg = g0 > 0.0 ? k / (2.0 * g0) : 0.0;
    const double g0_err = g0 > 0.0 ? dg * sd : std::sqrt(k * sd);
    rep.values = {g0, fit.slope};
    rep.std_errors = {g0_err, sd};
    rep.covariance.resize(2, 2);
    rep.covariance << g0_err * g0_err, dg * fit.variance, dg * fit.variance, fit.variance;
    rep.converged = true;
    return rep;
}

} // namespace cemech
