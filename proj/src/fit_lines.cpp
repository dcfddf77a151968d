#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cemech/estimate.hpp"

namespace cemech {

namespace {

double median(std::vector<double> v)
{
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

} // namespace

FitReport fit_affine(std::span<const double> x, std::span<const double> y, std::span<const double> sigma)
{
    if (x.size() != y.size() || (!sigma.empty() && sigma.size() != x.size())) {
        throw std::invalid_argument("fit_affine: x, y and sigma lengths differ");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("fit_affine: need at least two points");
    }
    double s = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = sigma.empty() ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        if (!std::isfinite(w) || !(w > 0.0)) {
            throw std::invalid_argument("fit_affine: sigma must be positive and finite");
        }
        s += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    // Centred sums keep the normal equations well conditioned.
    const double xm = sx / s;
    const double ym = sy / s;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = sigma.empty() ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        sxx += w * (x[i] - xm) * (x[i] - xm);
        sxy += w * (x[i] - xm) * (y[i] - ym);
    }

    FitReport rep;
    rep.names = {"slope", "intercept"};
    rep.n_points = x.size();
    rep.dof = x.size() - 2;
    rep.iterations = 0;
    rep.stop_reason = "closed form";
    if (!(sxx > 0.0) || !std::isfinite(sxx)) {
        rep.converged = false;
        rep.stop_reason = "failed";
        rep.diagnostics.push_back("all x values coincide: slope is not identifiable");
        rep.values = {std::nan(""), std::nan("")};
        rep.std_errors = rep.values;
        rep.covariance = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
        return rep;
    }
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;

    double chi2 = 0.0;
    double gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sd = sigma.empty() ? 1.0 : sigma[i];
        const double r = (y[i] - slope * x[i] - intercept) / sd;
        chi2 += r * r;
        gx += r * x[i] / sd;
        gy += r / sd;
    }
    const double scale = rep.dof > 0 ? chi2 / static_cast<double>(rep.dof) : 1.0;
    if (rep.dof == 0) {
        rep.warnings.push_back("no residual degrees of freedom: errors assume the given sigma (or unit sigma)");
    }
    Eigen::MatrixXd cov(2, 2);
    cov(0, 0) = 1.0 / sxx;
    cov(0, 1) = cov(1, 0) = -xm / sxx;
    cov(1, 1) = 1.0 / s + xm * xm / sxx;
    rep.covariance = cov * scale;
    rep.values = {slope, intercept};
    rep.std_errors = {std::sqrt(rep.covariance(0, 0)), std::sqrt(rep.covariance(1, 1))};
    rep.residual_rms = std::sqrt(chi2 / static_cast<double>(x.size()));
    rep.gradient_norm = std::max(std::abs(gx), std::abs(gy));
    rep.converged = true;
    return rep;
}

FitReport fit_lorentzian(const SpectrumTrace& trace, const LorentzianOptions& options)
{
    trace.validate();
    const auto& f = trace.frequencies_hz;
    const auto& y = trace.values;
    const std::size_t n = y.size();
    if (n < 5) {
        throw std::invalid_argument("fit_lorentzian: need at least 5 points");
    }
    if (!options.sigma.empty() && options.sigma.size() != n) {
        throw std::invalid_argument("fit_lorentzian: sigma length differs from the trace");
    }

    // Starting point: median offset, extremal bin, half-maximum crossings.
    const double offset0 = median(y);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(y[i] - offset0) > std::abs(y[peak] - offset0)) {
            peak = i;
        }
    }
    const double amp = y[peak] - offset0;
    if (amp == 0.0) {
        throw std::invalid_argument("fit_lorentzian: trace is flat, no feature to fit");
    }
    const double half = 0.5 * std::abs(amp);
    auto crossing = [&](int dir) {
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak);
        while (i + dir >= 0 && i + dir < static_cast<std::ptrdiff_t>(n)) {
            const std::ptrdiff_t j = i + dir;
            const double a = std::abs(y[static_cast<std::size_t>(i)] - offset0);
            const double b = std::abs(y[static_cast<std::size_t>(j)] - offset0);
            if (b < half) {
                const double t = (a - half) / (a - b);
                return f[static_cast<std::size_t>(i)] +
                       t * (f[static_cast<std::size_t>(j)] - f[static_cast<std::size_t>(i)]);
            }
            i = j;
        }
        return f[static_cast<std::size_t>(i)];
    };
    const double spacing = (f.back() - f.front()) / static_cast<double>(n - 1);
    double w0 = crossing(+1) - crossing(-1);
    if (!(w0 > spacing)) {
        w0 = spacing;
    }
    const double xref = f[peak];
    const double yscale = std::abs(amp);

    std::vector<double> u(n), v(n), s;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (f[i] - xref) / w0;
        v[i] = y[i] / yscale;
    }
    for (double sd : options.sigma) {
        s.push_back(sd / yscale);
    }
    const CurveModel model = [](double x, std::span<const double> p) {
        const double h = 0.5 * std::abs(p[1]);
        const double d = x - p[0];
        return p[3] + (p[2] / std::numbers::pi) * h / (d * d + h * h);
    };
    const double area0 = (amp / yscale) * std::numbers::pi * 0.5;
    FitReport internal = nlls_fit(model, u, v, s, {"c", "w", "a", "o"}, {0.0, 1.0, area0, offset0 / yscale});

    FitReport rep = reparametrize(internal, {"center", "fwhm", "area", "offset"}, [&](std::span<const double> p) {
        return std::vector<double>{xref + w0 * p[0], w0 * std::abs(p[1]), p[2] * yscale * w0, p[3] * yscale};
    });
    if (rep.converged) {
        const double c = rep.value("center");
        const double fw = rep.value("fwhm");
        const auto across = static_cast<std::size_t>(
            std::count_if(f.begin(), f.end(), [&](double x) { return std::abs(x - c) <= fw; }));
        if (across < options.min_points_across) {
            rep.warnings.push_back("only " + std::to_string(across) + " points within center +/- fwhm (want " +
                                   std::to_string(options.min_points_across) + ")");
        }
    }
    return rep;
}

FitReport fit_exponential_decay(const TimeTrace& energy_trace, const ExponentialOptions& options)
{
    energy_trace.validate();
    const std::vector<double> e = energy_trace.real_values();
    if (e.size() < 3) {
        throw std::invalid_argument("fit_exponential_decay: need at least 3 samples");
    }
    if (!(e.front() > 0.0)) {
        throw std::invalid_argument("fit_exponential_decay: first sample must be positive");
    }

    // Noise floor from second differences, which cancel the smooth decay.
    double floor_sigma = 0.0;
    if (e.size() >= 5) {
        std::vector<double> d2;
        d2.reserve(e.size() - 2);
        for (std::size_t i = 1; i + 1 < e.size(); ++i) {
            d2.push_back(e[i + 1] - 2.0 * e[i] + e[i - 1]);
        }
        const double med = median(d2);
        for (double& d : d2) {
            d = std::abs(d - med);
        }
        floor_sigma = 1.4826 * median(d2) / std::sqrt(6.0);
    }
    std::size_t keep = e.size();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!(e[i] > 0.0) || e[i] < options.snr_threshold * floor_sigma) {
            keep = i;
            break;
        }
    }
    if (keep < 3) {
        throw std::invalid_argument("fit_exponential_decay: fewer than 3 samples above the noise floor");
    }

    const double t_ref = energy_trace.t0;
    std::vector<double> t(keep), logs(keep), sigma(keep, 1.0);
    for (std::size_t i = 0; i < keep; ++i) {
        t[i] = energy_trace.time(i) - t_ref;
        logs[i] = std::log(e[i]);
    }
    FitReport line;
    if (options.weighting == DecayWeighting::relative) {
        line = fit_affine(t, logs);
    } else {
        // Additive noise: sd(log E) ~ sigma / E. First pass uses the data,
        // second pass the fitted model, to avoid biasing toward upward noise.
        for (std::size_t i = 0; i < keep; ++i) {
            sigma[i] = 1.0 / e[i];
        }
        line = fit_affine(t, logs, sigma);
        if (line.converged) {
            for (std::size_t i = 0; i < keep; ++i) {
                sigma[i] = std::exp(-(line.values[1] + line.values[0] * t[i]));
            }
            line = fit_affine(t, logs, sigma);
        }
    }
    FitReport rep = reparametrize(line, {"gamma", "amplitude"}, [](std::span<const double> p) {
        return std::vector<double>{-p[0], std::exp(p[1])};
    });
    rep.constants["t_ref_s"] = t_ref;
    rep.constants["noise_floor"] = floor_sigma;
    if (keep < e.size()) {
        rep.warnings.push_back("tail truncated at sample " + std::to_string(keep) + " of " +
                               std::to_string(e.size()) + " (below " + std::to_string(options.snr_threshold) +
                               " x noise floor)");
    }
    if (rep.converged && !(rep.value("gamma") > 0.0)) {
        rep.warnings.push_back("fitted decay rate is not positive");
    }
    return rep;
}

FitReport fit_tls_power_law(std::span<const RatePoint> points, std::optional<double> reference_temperature)
{
    if (points.size() < 2) {
        throw std::invalid_argument("fit_tls_power_law: need at least two points");
    }
    double log_sum = 0.0;
    for (const auto& p : points) {
        if (!(p.temperature > 0.0) || !(p.gamma > 0.0)) {
            throw std::invalid_argument("fit_tls_power_law: temperatures and rates must be positive");
        }
        log_sum += std::log(p.temperature);
    }
    const double t_ref = reference_temperature.value_or(std::exp(log_sum / static_cast<double>(points.size())));
    if (!(t_ref > 0.0)) {
        throw std::invalid_argument("fit_tls_power_law: reference temperature must be positive");
    }
    std::vector<double> x, y;
    for (const auto& p : points) {
        x.push_back(std::log(p.temperature / t_ref));
        y.push_back(std::log(p.gamma));
    }
    FitReport rep = reparametrize(fit_affine(x, y), {"gamma_ref", "alpha"}, [](std::span<const double> p) {
        return std::vector<double>{std::exp(p[1]), p[0]};
    });
    rep.constants["t_ref_k"] = t_ref;
    return rep;
}

} // namespace cemech
