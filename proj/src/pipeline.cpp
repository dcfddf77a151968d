#include "cemech/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cemech/backaction.hpp"
#include "cemech/cooling.hpp"
#include "cemech/estimate.hpp"
#include "cemech/io.hpp"
#include "cemech/plot.hpp"
#include "cemech/spectrum.hpp"
#include "cemech/timedomain.hpp"

namespace cemech::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Report

json Report::to_json() const
{
    json j;
    j["command"] = command;
    json in = json::array();
    for (const auto& [path, sha] : inputs) {
        in.push_back({{"path", path}, {"sha256", sha}});
    }
    j["inputs"] = in;
    j["digest"] = digest;
    j["seed"] = seed;
    json f = json::object();
    for (const auto& [name, rep] : fits) {
        f[name] = io::to_json(rep);
    }
    j["fits"] = f;
    json p = json::object();
    for (const auto& [name, par] : parameters) {
        p[name] = {{"value", par.value}, {"unit", par.unit}, {"source", par.source}};
    }
    j["parameters"] = p;
    json d = json::object();
    for (const auto& [name, der] : derived) {
        d[name] = {{"value", der.value},
                   {"error", der.error},
                   {"unit", der.unit},
                   {"operation", der.operation},
                   {"inputs", der.inputs}};
    }
    j["derived"] = d;
    j["warnings"] = warnings;
    j["errors"] = errors;
    j["exit_code"] = exit_code;
    return j;
}

namespace {

/// Input-side failure: maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PipelineConfig load(const Options& opts)
{
    return opts.config ? load_config(*opts.config) : PipelineConfig{};
}

/// Digest over every input's content, the config and the seed.
void attach_inputs(Report& rep, const std::vector<fs::path>& paths, const Options& opts)
{
    std::string all;
    for (const auto& p : paths) {
        const std::string sha = io::sha256_hex(io::read_file(p));
        rep.inputs.emplace_back(p.string(), sha);
        all += sha;
    }
    if (opts.config) {
        const std::string sha = io::sha256_hex(io::read_file(*opts.config));
        rep.inputs.emplace_back(opts.config->string(), sha);
        all += sha;
    }
    all += fmt::format("seed={}", opts.seed);
    rep.digest = io::sha256_hex(all);
    rep.seed = opts.seed;
}

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

void write_report(const Report& rep, const fs::path& base, OutputFormat format)
{
    if (format == OutputFormat::json) {
        io::write_file(base.string() + ".json", rep.to_json().dump(2) + "\n");
        return;
    }
    std::string out = "section,name,value,error,unit,source\n";
    for (const auto& [fit_name, fit] : rep.fits) {
        for (std::size_t i = 0; i < fit.names.size(); ++i) {
            out += fmt::format("fit,{},{:.17g},{:.17g},,{}\n", csv_cell(fit_name + "." + fit.names[i]),
                               fit.values[i], fit.std_errors[i], fit.converged ? "converged" : "not converged");
        }
    }
    for (const auto& [name, p] : rep.parameters) {
        out += fmt::format("parameter,{},{:.17g},,{},{}\n", csv_cell(name), p.value, csv_cell(p.unit),
                           csv_cell(p.source));
    }
    for (const auto& [name, d] : rep.derived) {
        out += fmt::format("derived,{},{:.17g},{:.17g},{},{}\n", csv_cell(name), d.value, d.error, csv_cell(d.unit),
                           csv_cell(d.operation));
    }
    for (const auto& w : rep.warnings) {
        out += fmt::format("warning,,,,,{}\n", csv_cell(w));
    }
    for (const auto& e : rep.errors) {
        out += fmt::format("error,,,,,{}\n", csv_cell(e));
    }
    io::write_file(base.string() + ".csv", out);
}

void emit_plot(const plot::Figure& fig, const fs::path& base, PlotFormat format)
{
    if (format == PlotFormat::svg) {
        plot::write_svg(base.string() + ".svg", fig);
    } else if (format == PlotFormat::png) {
        plot::write_png(base.string() + ".png", fig);
    }
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

void add_param(Report& rep, const std::string& name, double value, const std::string& unit,
               const std::string& source)
{
    rep.parameters[name] = {value, unit, source};
}

void add_fit_params(Report& rep, const FitReport& fit, const std::string& source,
                    std::initializer_list<std::tuple<const char*, const char*, double, const char*>> mapping)
{
    if (!fit.converged) {
        return;
    }
    for (const auto& [fit_name, name, scale, unit] : mapping) {
        if (fit.has(fit_name)) {
            add_param(rep, name, fit.value(fit_name) * scale, unit, source);
            rep.derived[name] = {fit.value(fit_name) * scale, fit.error(fit_name) * scale, unit,
                                 fmt::format("fit parameter '{}'", fit_name), {source}};
        }
    }
}

// ---------------------------------------------------------------------------
// fit

const std::set<std::string> fit_kinds = {"cavity", "ringdown", "spectrum", "gamma-vs-power", "tls",
                                         "drift",  "thermal",  "gorodetsky", "pull-curve"};

struct FileOutcome {
    Report report;
    std::string summary;
};

FileOutcome fit_file(const std::string& kind, const fs::path& path, const fs::path& base, const PipelineConfig& cfg,
                     const Options& opts)
{
    FileOutcome res;
    Report& rep = res.report;
    rep.command = "fit " + kind;
    const std::string src = path.string();
    plot::Figure fig;
    fig.title = fmt::format("{} fit: {}", kind, path.filename().string());
    FitReport fit;

    if (kind == "cavity") {
        bool magnitude_only = false;
        const S11Trace trace = io::read_s11_csv(path, magnitude_only);
        S11Options o;
        o.magnitude_only = magnitude_only;
        o.overcoupled_hint = cfg.fit.overcoupled_hint;
        fit = fit_s11(trace, o);
        add_fit_params(rep, fit, src,
                       {{"omega_c", "omega_c_hz", 1.0 / two_pi, "Hz"},
                        {"kappa", "kappa_hz", 1.0 / two_pi, "Hz"},
                        {"kappa_ex", "kappa_ex_hz", 1.0 / two_pi, "Hz"},
                        {"eta", "eta", 1.0, ""}});
        std::vector<double> mag, model;
        for (std::size_t i = 0; i < trace.values.size(); ++i) {
            mag.push_back(std::abs(trace.values[i]));
            if (fit.converged) {
                model.push_back(fit.value("gain_abs") *
                                std::abs(s11_model(hz_to_rad(trace.frequencies_hz[i]), fit.value("omega_c"),
                                                   fit.value("kappa"), fit.value("kappa_ex"))));
            }
        }
        fig.xlabel = "frequency (Hz)";
        fig.ylabel = "|S11|";
        fig.series.push_back({trace.frequencies_hz, mag, "data", true});
        if (fit.converged) {
            fig.series.push_back({trace.frequencies_hz, model, "fit", false});
        }
    } else if (kind == "ringdown") {
        const TimeTrace amp = io::read_timetrace(path);
        const TimeTrace e = amp.kind == SampleKind::real ? amp : energy(amp);
        std::size_t start = 0;
        if (cfg.fit.ringdown_start) {
            const double idx = std::ceil((*cfg.fit.ringdown_start - e.t0) * e.sample_rate - 1e-9);
            start = static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(e.size())));
        } else {
            const auto v = e.real_values();
            start = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
        }
        const TimeTrace decay = slice(e, start, e.size());
        ExponentialOptions o;
        o.weighting = cfg.fit.weighting;
        o.snr_threshold = cfg.fit.snr_threshold;
        fit = fit_exponential_decay(decay, o);
        add_fit_params(rep, fit, src, {{"gamma", "gamma_ringdown_hz", 1.0 / two_pi, "Hz"}});
        if (fit.converged && cfg.mechanics) {
            const double g = fit.value("gamma");
            rep.derived["quality_factor"] = {cfg.mechanics->omega_m / g,
                                             cfg.mechanics->omega_m / (g * g) * fit.error("gamma"), "",
                                             "quality_factor(omega_m, fitted gamma)",
                                             {src, cfg.source + ": mechanics.omega_m_hz"}};
        }
        std::vector<double> t, v, m;
        const auto vals = decay.real_values();
        for (std::size_t i = 0; i < decay.size(); ++i) {
            t.push_back(decay.time(i));
            v.push_back(vals[i]);
            if (fit.converged) {
                m.push_back(fit.value("amplitude") *
                            std::exp(-fit.value("gamma") * (decay.time(i) - fit.constants.at("t_ref_s"))));
            }
        }
        fig.xlabel = "time (s)";
        fig.ylabel = "energy";
        fig.log_y = true;
        fig.series.push_back({t, v, "data", false});
        if (fit.converged) {
            fig.series.push_back({t, m, "fit", false});
        }
    } else if (kind == "spectrum") {
        const SpectrumTrace trace = io::read_spectrum_csv(path);
        fit = fit_lorentzian(trace);
        add_fit_params(rep, fit, src,
                       {{"fwhm", "gamma_eff_hz", 1.0, "Hz"},
                        {"center", "center_hz", 1.0, "Hz"},
                        {"area", "area", 1.0, "trace units x Hz"}});
        if (fit.converged && cfg.calibration.quanta_per_area) {
            const double q = *cfg.calibration.quanta_per_area;
            const double a = fit.value("area");
            const double err = std::hypot(q * fit.error("area"), a * cfg.calibration.quanta_per_area_err);
            rep.derived["occupation"] = {a * q, err, "quanta", "area * quanta_per_area",
                                         {src, cfg.source + ": calibration.quanta_per_area"}};
        }
        std::vector<double> m;
        if (fit.converged) {
            const double h = 0.5 * fit.value("fwhm");
            for (double f : trace.frequencies_hz) {
                const double d = f - fit.value("center");
                m.push_back(fit.value("offset") + fit.value("area") / std::numbers::pi * h / (d * d + h * h));
            }
        }
        fig.xlabel = "frequency (Hz)";
        fig.ylabel = "PSD";
        fig.series.push_back({trace.frequencies_hz, trace.values, "data", false});
        if (fit.converged) {
            fig.series.push_back({trace.frequencies_hz, m, "fit", false});
        }
    } else if (kind == "gamma-vs-power") {
        const auto pts = io::read_power_rate_csv(path);
        fit = fit_gamma_vs_power(pts);
        add_fit_params(rep, fit, src, {{"gamma_m", "gamma_m_hz", 1.0 / two_pi, "Hz"}, {"p0", "p0_w", 1.0, "W"}});
        if (fit.converged) {
            const double p0 = fit.value("p0");
            rep.derived["p0_dbm"] = {watts_to_dbm(p0), 10.0 / std::log(10.0) * fit.error("p0") / p0, "dBm",
                                     "watts_to_dbm(p0)", {src}};
        }
        std::vector<double> p, g, m;
        for (const auto& pt : pts) {
            p.push_back(pt.power);
            g.push_back(rad_to_hz(pt.gamma_eff));
            if (fit.converged) {
                m.push_back(rad_to_hz(gamma_eff_of_power(pt.power, {fit.value("gamma_m"), fit.value("p0")})));
            }
        }
        fig.xlabel = "power at device (W)";
        fig.ylabel = "gamma_eff / 2 pi (Hz)";
        fig.log_x = fig.log_y = true;
        fig.series.push_back({p, g, "data", true});
        if (fit.converged) {
            fig.series.push_back({p, m, "fit", false});
        }
    } else if (kind == "tls") {
        const auto pts = io::read_rate_csv(path);
        fit = fit_tls_power_law(pts, cfg.fit.tls_reference);
        add_fit_params(rep, fit, src, {{"alpha", "tls_alpha", 1.0, ""}, {"gamma_ref", "tls_gamma_ref_hz", 1.0 / two_pi, "Hz"}});
        std::vector<double> t, g, m;
        for (const auto& pt : pts) {
            t.push_back(pt.temperature);
            g.push_back(rad_to_hz(pt.gamma));
            if (fit.converged) {
                m.push_back(rad_to_hz(fit.value("gamma_ref") *
                                      std::pow(pt.temperature / fit.constants.at("t_ref_k"), fit.value("alpha"))));
            }
        }
        fig.xlabel = "temperature (K)";
        fig.ylabel = "gamma_m / 2 pi (Hz)";
        fig.log_x = fig.log_y = true;
        fig.series.push_back({t, g, "data", true});
        if (fit.converged) {
            fig.series.push_back({t, m, "fit", false});
        }
    } else if (kind == "drift") {
        const TimeTrace amp = io::read_timetrace(path);
        if (amp.kind != SampleKind::complex_amplitude) {
            throw InputError(src + ": drift needs a complex (i, q) trace");
        }
        const TimeTrace freq = instantaneous_frequency(amp, cfg.fit.smoothing_window);
        std::vector<double> t;
        for (std::size_t i = 0; i < freq.size(); ++i) {
            t.push_back(freq.time(i));
        }
        const auto fv = freq.real_values();
        fit = fit_affine(t, fv);
        fit.names = {"drift_hz_per_s", "offset_hz"};
        fit.warnings.insert(fit.warnings.end(), freq.warnings.begin(), freq.warnings.end());
        add_fit_params(rep, fit, src, {{"drift_hz_per_s", "drift_hz_per_s", 1.0, "Hz/s"}});
        fig.xlabel = "time (s)";
        fig.ylabel = "instantaneous frequency (Hz)";
        fig.series.push_back({t, fv, "data", true});
        if (fit.converged) {
            std::vector<double> m;
            for (double x : t) {
                m.push_back(fit.values[0] * x + fit.values[1]);
            }
            fig.series.push_back({t, m, "fit", false});
        }
    } else if (kind == "thermal") {
        if (!cfg.mechanics) {
            throw InputError("thermal fit needs [mechanics] omega_m_hz in the config");
        }
        const auto pts = io::read_thermal_csv(path);
        const ThermalCalibration cal = thermal_calibration(pts, cfg.mechanics->omega_m, cfg.fit.threshold);
        fit = cal.fit;
        fit.constants["bath_extrapolation_k"] = cal.constant.bath_extrapolation;
        fit.constants["base_occupation"] = cal.base_occupation;
        add_fit_params(rep, fit, src, {{"quanta_per_area", "quanta_per_area", 1.0, "quanta / area"}});
        if (fit.converged) {
            add_param(rep, "bath_temperature_k", cal.constant.bath_extrapolation, "K", src);
            rep.derived["bath_temperature_k"] = {cal.constant.bath_extrapolation, 0.0, "K",
                                                 "temperature_from_occupation(base area * quanta_per_area)", {src}};
        }
        std::vector<double> t, a, m;
        for (const auto& p : pts) {
            t.push_back(p.temperature);
            a.push_back(p.area * p.correction);
            if (fit.converged) {
                m.push_back(fit.value("area_per_quantum") * thermal_occupation(p.temperature, cfg.mechanics->omega_m));
            }
        }
        fig.xlabel = "temperature (K)";
        fig.ylabel = "corrected area";
        fig.series.push_back({t, a, "data", true});
        if (fit.converged) {
            fig.series.push_back({t, m, "fit", false});
        }
    } else if (kind == "gorodetsky") {
        if (!cfg.mechanics || !(cfg.fit.pm_depth > 0.0) || !(cfg.fit.omega_mod > 0.0)) {
            throw InputError("gorodetsky fit needs [mechanics] omega_m_hz and [fit] pm_depth_rad, mod_frequency_hz");
        }
        const auto pts = io::read_ratio_csv(path);
        fit = gorodetsky_g0(pts, cfg.fit.pm_depth, cfg.fit.omega_mod, cfg.mechanics->omega_m, cfg.fit.threshold);
        add_fit_params(rep, fit, src, {{"g0", "g0_hz", 1.0 / two_pi, "Hz"}});
        std::vector<double> n, r;
        for (const auto& p : pts) {
            n.push_back(thermal_occupation(p.temperature, cfg.mechanics->omega_m));
            r.push_back(p.ratio);
        }
        fig.xlabel = "thermal occupation";
        fig.ylabel = "peak area ratio";
        fig.series.push_back({n, r, "data", true});
        if (fit.converged) {
            std::vector<double> m;
            for (double x : n) {
                m.push_back(fit.value("ratio_per_quantum") * x);
            }
            fig.series.push_back({n, m, "fit", false});
        }
    } else if (kind == "pull-curve") {
        if (!cfg.circuit) {
            throw InputError("pull-curve fit needs [circuit] pad_area_m2 in the config");
        }
        const auto pts = io::read_pull_csv(path);
        fit = fit_pull_curve(pts, cfg.circuit->pad_area, cfg.circuit->plate_model);
        add_fit_params(rep, fit, src,
                       {{"c_p", "parasitic_capacitance_f", 1.0, "F"}, {"inductance", "inductance_h", 1.0, "H"}});
        std::vector<double> d, f;
        for (const auto& p : pts) {
            d.push_back(p.gap);
            f.push_back(rad_to_hz(p.omega_r));
        }
        fig.xlabel = "gap (m)";
        fig.ylabel = "resonance (Hz)";
        fig.series.push_back({d, f, "data", true});
        if (fit.converged) {
            CircuitModel m = *cfg.circuit;
            m.parasitic_capacitance = fit.value("c_p");
            m.inductance = fit.value("inductance");
            rep.derived["bare_frequency_hz"] = {rad_to_hz(bare_resonance(m)), 0.0, "Hz", "bare_resonance(C_p, L)",
                                                {src}};
            std::vector<double> mf;
            for (double g : d) {
                mf.push_back(rad_to_hz(resonance_frequency(g, m)));
            }
            fig.series.push_back({d, mf, "fit", false});
        }
    }

    rep.fits[kind] = fit;
    rep.warnings.insert(rep.warnings.end(), fit.warnings.begin(), fit.warnings.end());
    if (!fit.converged) {
        rep.exit_code = exit_fit_failure;
        rep.errors.insert(rep.errors.end(), fit.diagnostics.begin(), fit.diagnostics.end());
        if (fit.diagnostics.empty()) {
            rep.errors.push_back("fit did not converge: " + fit.stop_reason);
        }
    }
    emit_plot(fig, base, opts.plot);

    std::string summary = fmt::format("{}: {}", src, fit.converged ? "converged" : "FAILED");
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        summary += fmt::format(" {}={:.6g}+/-{:.2g}", fit.names[i], fit.values[i], fit.std_errors[i]);
    }
    res.summary = summary;
    return res;
}

std::vector<fs::path> sorted_unique(std::vector<fs::path> paths)
{
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    return paths;
}

/// Output stems, disambiguated when two inputs share a file name.
std::vector<std::string> output_stems(const std::vector<fs::path>& inputs)
{
    std::map<std::string, int> seen;
    for (const auto& p : inputs) {
        ++seen[p.stem().string()];
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto stem = inputs[i].stem().string();
        out.push_back(seen[stem] > 1 ? fmt::format("{}_{}", stem, i) : stem);
    }
    return out;
}

} // namespace

int cmd_fit(const std::string& kind, const std::vector<fs::path>& inputs_in, const Options& opts, std::ostream& out,
            std::ostream& err)
{
    if (!fit_kinds.count(kind)) {
        err << fmt::format("error: unknown fit kind '{}'\n", kind);
        return exit_input_error;
    }
    if (inputs_in.empty()) {
        err << "error: no input files\n";
        return exit_input_error;
    }
    PipelineConfig cfg;
    try {
        cfg = load(opts);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    const auto inputs = sorted_unique(inputs_in);
    const auto stems = output_stems(inputs);
    std::vector<FileOutcome> results(inputs.size());

    // Independent files; each is processed single-threaded.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const fs::path base = opts.out / fmt::format("{}.{}", stems[i], kind);
        FileOutcome& r = results[i];
        try {
            r = fit_file(kind, inputs[i], base, cfg, opts);
            attach_inputs(r.report, {inputs[i]}, opts);
        } catch (const std::exception& e) {
            r.report = Report{};
            r.report.command = "fit " + kind;
            r.report.exit_code = exit_input_error;
            r.report.errors.push_back(e.what());
            r.summary = fmt::format("{}: ERROR {}", inputs[i].string(), e.what());
            try {
                attach_inputs(r.report, {inputs[i]}, opts);
            } catch (const std::exception&) {
                r.report.inputs.emplace_back(inputs[i].string(), "");
            }
        }
        try {
            write_report(r.report, base, opts.format);
        } catch (const std::exception& e) {
            r.report.exit_code = exit_input_error;
            r.summary += fmt::format(" (cannot write report: {})", e.what());
        }
    }

    int code = exit_ok;
    for (const auto& r : results) {
        out << r.summary << "\n";
        for (const auto& w : r.report.warnings) {
            err << "warning: " << w << "\n";
        }
        for (const auto& e : r.report.errors) {
            err << (r.report.exit_code == exit_input_error ? "error: " : "fit failure: ") << e << "\n";
        }
        if (r.report.exit_code == exit_input_error) {
            code = exit_input_error;
        } else if (r.report.exit_code == exit_fit_failure && code == exit_ok) {
            code = exit_fit_failure;
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// simulate

namespace {

int simulate_spectrum(const PipelineConfig& cfg, const Options& opts, Report& rep, std::ostream& out)
{
    if (!cfg.spectrum || !cfg.mechanics || !cfg.cavity) {
        throw InputError("simulate spectrum needs [spectrum], [mechanics] and [cavity] sections");
    }
    const auto& sp = *cfg.spectrum;
    const auto& mech = *cfg.mechanics;
    const auto& cav = *cfg.cavity;
    const double delta = cfg.drive ? cfg.drive->detuning : -mech.omega_m;
    double g = 0.0;
    if (sp.coupling) {
        g = *sp.coupling;
        rep.derived["g_hz"] = {rad_to_hz(g), 0.0, "Hz", "given", {cfg.source + ": spectrum.g_hz"}};
    } else {
        if (!cfg.g0 || !cfg.drive || !std::isfinite(cav.omega_c)) {
            throw InputError("simulate spectrum needs spectrum.g_hz, or coupling.g0_hz with a [drive] section and "
                             "cavity.omega_c_hz");
        }
        const double n = intracavity_photons(*cfg.drive, cav);
        g = coupled_rate(*cfg.g0, n);
        rep.derived["intracavity_photons"] = {n, 0.0, "photons", "intracavity_photons(drive, cavity)",
                                              {cfg.source + ": drive", cfg.source + ": cavity"}};
        rep.derived["g_hz"] = {rad_to_hz(g), 0.0, "Hz", "coupled_rate(g0, photons)", {cfg.source + ": coupling.g0_hz"}};
    }
    const BackactionResult ba = backaction_rates(g, delta, mech.omega_m, cav.kappa, mech.gamma_m);
    const double n_th = cfg.environment ? thermal_occupation(cfg.environment->temperature, mech.omega_m) : 0.0;
    const NoiseBudget nb = cfg.noise.value_or(NoiseBudget{0, 0, 0, cav.eta()});
    const SpectrumNoise noise{n_th, nb.n_tilde(), nb.n_add};
    const auto freqs = linspace(sp.start_hz, sp.stop_hz, sp.points);

    SpectrumTrace trace;
    if (sp.full_model) {
        trace = spectrum_full(freqs, {cav.kappa, cav.kappa_ex, delta, mech.omega_m, g, mech.gamma_m}, noise);
    } else {
        trace = spectrum_rwa(freqs, {mech.gamma_m, ba.gamma_e, ba.omega_eff, cav.eta()}, noise);
    }
    trace.metadata.source = "simulate spectrum";
    rep.warnings.insert(rep.warnings.end(), trace.metadata.warnings.begin(), trace.metadata.warnings.end());
    rep.derived["gamma_e_hz"] = {rad_to_hz(ba.gamma_e), 0.0, "Hz", "backaction_rates(g, delta, omega_m, kappa)",
                                 {cfg.source}};
    rep.derived["omega_eff_hz"] = {rad_to_hz(ba.omega_eff), 0.0, "Hz", "backaction_rates", {cfg.source}};
    rep.derived["n_th"] = {n_th, 0.0, "quanta", "thermal_occupation(T, omega_m)", {cfg.source}};
    rep.derived["n_bar"] = {occupation_from_rates(mech.gamma_m, std::max(ba.gamma_e, 0.0), n_th, nb.n_tilde()), 0.0,
                            "quanta", "occupation_from_rates", {cfg.source}};

    const fs::path csv = opts.out / "spectrum.csv";
    io::write_spectrum_csv(csv, trace);
    out << "wrote " << csv.string() << "\n";
    plot::Figure fig{"simulated spectrum", "frequency from pump (Hz)", "PSD (quanta)",
                     {{trace.frequencies_hz, trace.values, sp.full_model ? "full" : "rwa", false}}};
    emit_plot(fig, opts.out / "spectrum", opts.plot);
    return exit_ok;
}

int simulate_ringdown_cmd(const PipelineConfig& cfg, const Options& opts, Report& rep, std::ostream& out)
{
    if (!cfg.ringdown) {
        throw InputError("simulate ringdown needs a [ringdown] section");
    }
    const auto& r = *cfg.ringdown;
    RingdownSimulation sim = simulate_ringdown(r.protocol, r.sample_rate);
    if (r.noise_sigma > 0.0) {
        add_white_noise(sim.amplitude, r.noise_sigma, opts.seed);
    }
    rep.derived["decay_start_s"] = {sim.amplitude.time(std::min(sim.decay_start, sim.amplitude.size() - 1)), 0.0,
                                    "s", "simulate_ringdown", {cfg.source}};
    const fs::path csv = opts.out / "ringdown.csv";
    io::write_timetrace_csv(csv, sim.amplitude);
    out << "wrote " << csv.string() << "\n";
    if (r.write_binary) {
        const fs::path bin = opts.out / "ringdown.bin";
        io::write_timetrace_binary(bin, sim.amplitude);
        out << "wrote " << bin.string() << "\n";
    }
    const TimeTrace e = energy(sim.amplitude);
    std::vector<double> t;
    for (std::size_t i = 0; i < e.size(); ++i) {
        t.push_back(e.time(i));
    }
    plot::Figure fig{"simulated ringdown", "time (s)", "energy", {{t, e.real_values(), "|a|^2", false}}};
    fig.log_y = true;
    emit_plot(fig, opts.out / "ringdown", opts.plot);
    return exit_ok;
}

int simulate_trajectory(const PipelineConfig& cfg, const Options& opts, Report& rep, std::ostream& out)
{
    if (!cfg.trajectory) {
        throw InputError("simulate trajectory needs a [trajectory] section");
    }
    const auto& t = *cfg.trajectory;
    const TimeTrace tr =
        simulate_thermal_trajectory({t.gamma_eff, t.omega_offset}, t.occupation, t.sample_rate, t.duration, opts.seed);
    rep.warnings.insert(rep.warnings.end(), tr.warnings.begin(), tr.warnings.end());
    const std::size_t seg = std::min(t.segment, tr.size());
    const SpectrumTrace psd = welch_psd(tr, seg, t.overlap);
    rep.derived["welch_averages"] = {static_cast<double>(psd.metadata.averages), 0.0, "", "welch_psd", {cfg.source}};
    rep.derived["resolution_bandwidth_hz"] = {psd.metadata.resolution_bandwidth_hz, 0.0, "Hz", "welch_psd",
                                              {cfg.source}};
    const fs::path csv = opts.out / "trajectory.csv";
    const fs::path psd_csv = opts.out / "trajectory_psd.csv";
    io::write_timetrace_csv(csv, tr);
    io::write_spectrum_csv(psd_csv, psd);
    out << "wrote " << csv.string() << "\nwrote " << psd_csv.string() << "\n";
    plot::Figure fig{"thermal trajectory PSD", "frequency (Hz)", "PSD (quanta / Hz)",
                     {{psd.frequencies_hz, psd.values, "welch", false}}};
    fig.log_y = true;
    emit_plot(fig, opts.out / "trajectory_psd", opts.plot);
    return exit_ok;
}

} // namespace

int cmd_simulate(const std::string& kind, const Options& opts, std::ostream& out, std::ostream& err)
{
    Report rep;
    rep.command = "simulate " + kind;
    try {
        const PipelineConfig cfg = load(opts);
        attach_inputs(rep, {}, opts);
        if (kind == "spectrum") {
            rep.exit_code = simulate_spectrum(cfg, opts, rep, out);
        } else if (kind == "ringdown") {
            rep.exit_code = simulate_ringdown_cmd(cfg, opts, rep, out);
        } else if (kind == "trajectory") {
            rep.exit_code = simulate_trajectory(cfg, opts, rep, out);
        } else {
            err << fmt::format("error: unknown simulation '{}' (spectrum, ringdown, trajectory)\n", kind);
            return exit_input_error;
        }
        write_report(rep, opts.out / ("simulate_" + kind), opts.format);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    for (const auto& w : rep.warnings) {
        err << "warning: " << w << "\n";
    }
    return rep.exit_code;
}

// ---------------------------------------------------------------------------
// cooling-curve

int cmd_cooling_curve(const std::vector<fs::path>& inputs_in, const Options& opts, std::ostream& out,
                      std::ostream& err)
{
    Report rep;
    rep.command = "cooling-curve";
    try {
        const PipelineConfig cfg = load(opts);
        if (!cfg.calibration.quanta_per_area) {
            throw InputError("missing calibration constant: set [calibration] quanta_per_area (run `cemech fit "
                             "thermal` to obtain it)");
        }
        if (!cfg.pump) {
            throw InputError("missing pump model: set [pump] gamma_m_hz and p0_dbm (run `cemech fit gamma-vs-power`)");
        }
        if (!cfg.cooling) {
            throw InputError("missing noise model: set [cooling] noise_slope_per_w");
        }
        if (!cfg.sweep) {
            throw InputError("missing power sweep: set [sweep] start_dbm, stop_dbm, points");
        }
        const auto inputs = sorted_unique(inputs_in);
        attach_inputs(rep, inputs, opts);

        double n_th = 0.0;
        std::string n_th_source;
        if (cfg.cooling->n_th) {
            n_th = *cfg.cooling->n_th;
            n_th_source = "cooling.n_th";
        } else if (cfg.mechanics && cfg.calibration.bath_temperature) {
            n_th = thermal_occupation(*cfg.calibration.bath_temperature, cfg.mechanics->omega_m);
            n_th_source = "calibration.bath_temperature_k";
        } else if (cfg.mechanics && cfg.environment) {
            n_th = thermal_occupation(cfg.environment->temperature, cfg.mechanics->omega_m);
            n_th_source = "environment.temperature_k";
        } else {
            throw InputError("no thermal occupation: set [cooling] n_th, or [mechanics] with a bath temperature");
        }
        const double qpa = *cfg.calibration.quanta_per_area;
        const double rel_cal = cfg.calibration.quanta_per_area_err / qpa;
        const auto& pump = *cfg.pump;
        const auto& cool = *cfg.cooling;

        std::vector<double> powers_dbm = linspace(cfg.sweep->start_dbm, cfg.sweep->stop_dbm, cfg.sweep->points);
        std::vector<double> powers;
        for (double d : powers_dbm) {
            powers.push_back(dbm_to_watts(d));
        }
        const CoolingCurve curve = cooling_curve(powers, pump, n_th, cool.noise_slope);

        // Linear error propagation through n = (n_th + x s P) / (1 + x), x = P / p0.
        auto n_err = [&](double p) {
            const double x = p / pump.p0;
            const double dn_dx = (cool.noise_slope * p - n_th) / ((1 + x) * (1 + x));
            const double dn_dp0 = dn_dx * (-x / pump.p0);
            const double dn_ds = x * p / (1 + x);
            const double dn_dnth = 1.0 / (1 + x);
            return std::sqrt(std::pow(dn_dp0 * cool.p0_err, 2) + std::pow(dn_ds * cool.noise_slope_err, 2) +
                             std::pow(dn_dnth * n_th * rel_cal, 2));
        };
        std::vector<double> gamma_e_hz, n_tilde, n_bar, err_v;
        for (const auto& pt : curve.points) {
            gamma_e_hz.push_back(rad_to_hz(pt.gamma_e));
            n_tilde.push_back(pt.n_tilde);
            n_bar.push_back(pt.n_bar);
            err_v.push_back(n_err(pt.power));
        }
        io::write_csv(opts.out / "cooling_curve.csv",
                      {"power_dbm", "power_w", "gamma_e_hz", "n_tilde", "n_bar", "n_bar_err"},
                      {powers_dbm, powers, gamma_e_hz, n_tilde, n_bar, err_v});
        const std::vector<std::string> provenance = {cfg.source + ": pump", cfg.source + ": cooling",
                                                     cfg.source + ": " + n_th_source,
                                                     cfg.source + ": calibration.quanta_per_area"};
        rep.derived["n_th"] = {n_th, n_th * rel_cal, "quanta", "thermal_occupation", provenance};
        rep.derived["n_min_grid"] = {curve.n_min, n_err(curve.p_opt), "quanta", "cooling_curve (grid minimum)",
                                     provenance};
        rep.derived["p_opt_grid_dbm"] = {watts_to_dbm(curve.p_opt), 0.0, "dBm", "cooling_curve (grid minimum)",
                                         provenance};
        const CoolingOptimum opt = cooling_optimum(n_th, cool.noise_slope * pump.p0);
        rep.derived["n_min"] = {opt.n_min, n_err(opt.power_ratio * pump.p0), "quanta", "cooling_optimum (exact)",
                                provenance};
        rep.derived["p_opt_dbm"] = {watts_to_dbm(opt.power_ratio * pump.p0), 0.0, "dBm", "cooling_optimum (exact)",
                                    provenance};
        rep.derived["p_opt_over_p0"] = {opt.power_ratio, 0.0, "", "cooling_optimum (exact)", provenance};

        plot::Figure fig{"cooling curve", "power at device (W)", "phonon occupation", {{powers, n_bar, "model", false}}};
        fig.log_x = fig.log_y = true;

        // Measured sideband areas converted with the calibration constant.
        json measured = json::array();
        for (const auto& path : inputs) {
            const io::Table t = io::read_csv(path);
            const auto pcol = t.first_of({"power_dbm", "power_w"});
            if (!pcol || !t.has("area")) {
                throw io::ParseError(path.string(), 1, "need columns power_dbm (or power_w) and area");
            }
            std::vector<double> mp, mn;
            for (const auto& row : t.rows) {
                const double p = *pcol == "power_w" ? row[t.index("power_w")] : dbm_to_watts(row[t.index("power_dbm")]);
                const double a = row[t.index("area")];
                const double sa = t.has("sigma") ? row[t.index("sigma")] : 0.0;
                const double n = a * qpa;
                const double sn = std::hypot(sa * qpa, n * rel_cal);
                measured.push_back({{"source", path.string()}, {"power_w", p}, {"n_bar", n}, {"n_bar_err", sn},
                                    {"model_n_bar", occupation_from_rates(pump.gamma_m, pump.gamma_m * p / pump.p0,
                                                                          n_th, cool.noise_slope * p)}});
                mp.push_back(p);
                mn.push_back(n);
            }
            fig.series.push_back({mp, mn, path.filename().string(), true});
        }
        json j = rep.to_json();
        j["curve"] = io::to_json(curve);
        j["measured"] = measured;
        if (opts.format == OutputFormat::json) {
            io::write_file(opts.out / "cooling_curve.json", j.dump(2) + "\n");
        } else {
            write_report(rep, opts.out / "cooling_curve_report", opts.format);
        }
        emit_plot(fig, opts.out / "cooling_curve", opts.plot);
        out << fmt::format("n_min = {:.4g} +/- {:.2g} at {:.2f} dBm (P/P0 = {:.4g})\n", opt.n_min,
                           rep.derived["n_min"].error, rep.derived["p_opt_dbm"].value, opt.power_ratio);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// report

namespace {

void config_parameters(const PipelineConfig& cfg, const std::string& src, std::vector<std::pair<std::string, Parameter>>& out)
{
    auto add = [&](const std::string& name, double v, const std::string& unit) {
        if (std::isfinite(v)) {
            out.push_back({name, {v, unit, src}});
        }
    };
    if (cfg.cavity) {
        add("omega_c_hz", rad_to_hz(cfg.cavity->omega_c), "Hz");
        add("kappa_hz", rad_to_hz(cfg.cavity->kappa), "Hz");
        add("kappa_ex_hz", rad_to_hz(cfg.cavity->kappa_ex), "Hz");
    }
    if (cfg.mechanics) {
        add("omega_m_hz", rad_to_hz(cfg.mechanics->omega_m), "Hz");
        add("gamma_m_hz", rad_to_hz(cfg.mechanics->gamma_m), "Hz");
        if (cfg.mechanics->mass) {
            add("mass_kg", *cfg.mechanics->mass, "kg");
        }
    }
    if (cfg.drive) {
        add("power_w", cfg.drive->power_at_device, "W");
        add("detuning_hz", rad_to_hz(cfg.drive->detuning), "Hz");
    }
    if (cfg.environment) {
        add("temperature_k", cfg.environment->temperature, "K");
    }
    if (cfg.noise) {
        add("n_add", cfg.noise->n_add, "quanta");
        add("n_c", cfg.noise->n_c, "quanta");
        add("n_0", cfg.noise->n_0, "quanta");
    }
    if (cfg.g0) {
        add("g0_hz", rad_to_hz(*cfg.g0), "Hz");
    }
    if (cfg.pump) {
        add("gamma_m_hz", rad_to_hz(cfg.pump->gamma_m), "Hz");
        add("p0_w", cfg.pump->p0, "W");
    }
    if (cfg.cooling) {
        add("noise_slope_per_w", cfg.cooling->noise_slope, "quanta/W");
    }
    if (cfg.calibration.quanta_per_area) {
        add("quanta_per_area", *cfg.calibration.quanta_per_area, "quanta / area");
    }
    if (cfg.calibration.bath_temperature) {
        add("bath_temperature_k", *cfg.calibration.bath_temperature, "K");
    }
    if (cfg.circuit) {
        if (cfg.circuit->inductance > 0.0) {
            add("inductance_h", cfg.circuit->inductance, "H");
        }
        if (cfg.circuit->parasitic_capacitance > 0.0) {
            add("parasitic_capacitance_f", cfg.circuit->parasitic_capacitance, "F");
        }
        add("pad_area_m2", cfg.circuit->pad_area, "m^2");
        add("gap_m", cfg.circuit->gap, "m");
    }
}

void derive_all(Report& rep, const std::optional<PlateModel>& plate)
{
    const auto& P = rep.parameters;
    auto has = [&](std::initializer_list<const char*> names) {
        return std::all_of(names.begin(), names.end(), [&](const char* n) { return P.count(n) > 0; });
    };
    auto v = [&](const char* n) { return P.at(n).value; };
    auto srcs = [&](std::initializer_list<const char*> names) {
        std::vector<std::string> out;
        for (const char* n : names) {
            out.push_back(fmt::format("{} ({})", n, P.at(n).source));
        }
        return out;
    };
    auto& D = rep.derived;

    if (has({"omega_m_hz", "gamma_m_hz"})) {
        MechanicalMode m{hz_to_rad(v("omega_m_hz")), hz_to_rad(v("gamma_m_hz")), std::nullopt};
        D["quality_factor"] = {quality_factor(m), 0.0, "", "quality_factor(mode)", srcs({"omega_m_hz", "gamma_m_hz"})};
    }
    if (has({"kappa_hz", "kappa_ex_hz"})) {
        D["eta"] = {v("kappa_ex_hz") / v("kappa_hz"), 0.0, "", "kappa_ex / kappa", srcs({"kappa_hz", "kappa_ex_hz"})};
    }
    const char* temp = P.count("temperature_k") ? "temperature_k" : "bath_temperature_k";
    std::optional<double> n_th;
    if (P.count(temp) && has({"omega_m_hz"})) {
        n_th = thermal_occupation(v(temp), hz_to_rad(v("omega_m_hz")));
        D["n_th"] = {*n_th, 0.0, "quanta", "thermal_occupation(T, omega_m)", srcs({temp, "omega_m_hz"})};
        if (has({"gamma_m_hz"})) {
            MechanicalMode m{hz_to_rad(v("omega_m_hz")), hz_to_rad(v("gamma_m_hz")), std::nullopt};
            const CoherenceTime ct = coherence_time(m, {v(temp)});
            if (!ct.infinite) {
                D["coherence_time_s"] = {ct.seconds, 0.0, "s", "coherence_time(mode, T): 1 / (n_th gamma_m)",
                                         srcs({temp, "omega_m_hz", "gamma_m_hz"})};
                D["coherence_time_high_t_s"] = {ct.high_temperature, 0.0, "s", "hbar Q / (k_B T)",
                                                srcs({temp, "omega_m_hz", "gamma_m_hz"})};
            }
            if (has({"mass_kg"})) {
                m.mass = v("mass_kg");
                D["force_noise_n_per_rthz"] = {force_noise_density(m, v(temp)), 0.0, "N/sqrt(Hz)",
                                               "force_noise_density: sqrt(4 m gamma_m k_B T)",
                                               srcs({"mass_kg", "gamma_m_hz", temp})};
            }
        }
    }
    if (has({"power_w", "kappa_hz", "kappa_ex_hz", "omega_c_hz", "omega_m_hz", "gamma_m_hz"})) {
        const double kappa = hz_to_rad(v("kappa_hz"));
        const double omega_m = hz_to_rad(v("omega_m_hz"));
        const double gamma_m = hz_to_rad(v("gamma_m_hz"));
        const double delta = P.count("detuning_hz") ? hz_to_rad(v("detuning_hz")) : -omega_m;
        const CavityParams cav{hz_to_rad(v("omega_c_hz")), kappa, hz_to_rad(v("kappa_ex_hz"))};
        const double n = intracavity_photons({v("power_w"), delta, 0.0}, cav);
        D["intracavity_photons"] = {n, 0.0, "photons", "intracavity_photons(P, delta, cavity)",
                                    srcs({"power_w", "kappa_hz", "kappa_ex_hz", "omega_c_hz"})};
        if (has({"g0_hz"})) {
            const double g = coupled_rate(hz_to_rad(v("g0_hz")), n);
            const BackactionResult ba = backaction_rates(g, delta, omega_m, kappa, gamma_m);
            const auto in = srcs({"g0_hz", "power_w", "kappa_hz", "omega_m_hz", "gamma_m_hz"});
            D["g_hz"] = {rad_to_hz(g), 0.0, "Hz", "coupled_rate(g0, photons)", in};
            D["gamma_e_hz"] = {rad_to_hz(ba.gamma_e), 0.0, "Hz", "backaction_rates", in};
            if (ba.gamma_e > 0.0 && n_th) {
                const Cooperativities c = cooperativities(ba.gamma_e, gamma_m, *n_th);
                D["cooperativity"] = {c.classical, 0.0, "", "gamma_e / gamma_m", in};
                D["quantum_cooperativity"] = {c.quantum, 0.0, "", "C / n_th", in};
                double n_tilde = 0.0;
                if (has({"n_c"}) || has({"n_0"})) {
                    const double eta = v("kappa_ex_hz") / v("kappa_hz");
                    n_tilde = eta * (P.count("n_c") ? v("n_c") : 0.0) + (1 - eta) * (P.count("n_0") ? v("n_0") : 0.0);
                }
                D["n_bar"] = {occupation_from_rates(gamma_m, ba.gamma_e, *n_th, n_tilde), 0.0, "quanta",
                              "occupation_from_rates(gamma_m, gamma_e, n_th, n~)", in};
            }
        }
    }
    if (has({"p0_w", "noise_slope_per_w"}) && n_th) {
        const CoolingOptimum opt = cooling_optimum(*n_th, v("noise_slope_per_w") * v("p0_w"));
        D["n_min"] = {opt.n_min, 0.0, "quanta", "cooling_optimum(n_th, noise_slope p0)",
                      srcs({"p0_w", "noise_slope_per_w"})};
        D["p_opt_dbm"] = {watts_to_dbm(opt.power_ratio * v("p0_w")), 0.0, "dBm", "cooling_optimum",
                          srcs({"p0_w", "noise_slope_per_w"})};
    }
    if (has({"inductance_h", "parasitic_capacitance_f", "pad_area_m2"})) {
        CircuitModel c;
        c.inductance = v("inductance_h");
        c.parasitic_capacitance = v("parasitic_capacitance_f");
        c.pad_area = v("pad_area_m2");
        c.gap = P.count("gap_m") ? v("gap_m") : std::numeric_limits<double>::infinity();
        c.plate_model = plate.value_or(PlateModel::series_half_pads);
        const auto in = srcs({"inductance_h", "parasitic_capacitance_f", "pad_area_m2"});
        D["bare_frequency_hz"] = {rad_to_hz(bare_resonance(c)), 0.0, "Hz", "1 / sqrt(C_p L)", in};
        if (std::isfinite(c.gap)) {
            const double cm = c.membrane_capacitance();
            D["membrane_capacitance_f"] = {cm, 0.0, "F", "membrane_capacitance(gap, area)", in};
            D["participation"] = {participation_ratio(cm, c.parasitic_capacitance), 0.0, "",
                                  "C_m / (C_m + C_p)", in};
            D["resonance_frequency_hz"] = {rad_to_hz(resonance_frequency(c.gap, c)), 0.0, "Hz",
                                           "resonance_frequency(gap, circuit)", in};
        }
    }
}

} // namespace

int cmd_report(const std::vector<fs::path>& inputs_in, const Options& opts, std::ostream& out, std::ostream& err)
{
    if (inputs_in.empty()) {
        err << "error: report needs at least one input (configs or reports)\n";
        return exit_input_error;
    }
    Report rep;
    rep.command = "report";
    try {
        auto inputs = sorted_unique(inputs_in);
        std::vector<std::pair<std::string, Parameter>> found;
        std::optional<PlateModel> plate;
        if (opts.config) {
            inputs.insert(inputs.begin(), *opts.config);
        }
        for (const auto& path : inputs) {
            const std::string src = path.string();
            if (path.extension() == ".json") {
                json j;
                try {
                    j = json::parse(io::read_file(path));
                } catch (const json::parse_error& e) {
                    throw io::ParseError(src, 0, e.what());
                }
                if (!j.is_object()) {
                    throw io::ParseError(src, 0, "report must be a JSON object");
                }
                for (const auto& [name, p] : j.value("parameters", json::object()).items()) {
                    found.push_back({name, {p.at("value").get<double>(), p.value("unit", ""), src}});
                }
                for (const auto& [name, f] : j.value("fits", json::object()).items()) {
                    rep.fits[path.stem().string() + ":" + name] = io::fit_report_from_json(f);
                }
            } else {
                const PipelineConfig cfg = load_config(path);
                config_parameters(cfg, src, found);
                if (cfg.circuit) {
                    plate = cfg.circuit->plate_model;
                }
            }
        }
        attach_inputs(rep, sorted_unique(inputs_in), opts);
        for (const auto& [name, p] : found) {
            const auto it = rep.parameters.find(name);
            if (it == rep.parameters.end()) {
                rep.parameters[name] = p;
                continue;
            }
            const double a = it->second.value;
            const double b = p.value;
            if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b))) {
                rep.warnings.push_back(fmt::format("conflicting values for {}: {:.10g} from {} and {:.10g} from {}; "
                                                   "using the first",
                                                   name, a, it->second.source, b, p.source));
            }
        }
        derive_all(rep, plate);
        write_report(rep, opts.out / "report", opts.format);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }

    out << "parameters\n";
    for (const auto& [name, p] : rep.parameters) {
        out << fmt::format("  {:<26} {:>14.6g} {:<8} {}\n", name, p.value, p.unit, p.source);
    }
    out << "derived\n";
    for (const auto& [name, d] : rep.derived) {
        out << fmt::format("  {:<26} {:>14.6g} {:<8} {}\n", name, d.value, d.unit, d.operation);
    }
    for (const auto& w : rep.warnings) {
        err << "warning: " << w << "\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// entry point

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Simulation and calibration toolkit for sideband-cooled electromechanics", "cemech"};
    app.require_subcommand(1);
    Options opts;
    std::string config, format = "json", plot_kind = "none";
    app.add_option("--config", config, "Pipeline config file (INI, unit-suffixed keys)");
    app.add_option("--seed", opts.seed, "Seed for all randomness");
    app.add_option("--out", opts.out, "Output directory");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--plot", plot_kind, "Plot output")->check(CLI::IsMember({"none", "svg", "png"}));

    std::string fit_kind, sim_kind;
    std::vector<std::string> inputs;
    auto* fit = app.add_subcommand("fit", "Fit data files");
    fit->add_option("kind", fit_kind, "cavity, ringdown, spectrum, gamma-vs-power, tls, drift, thermal, gorodetsky, "
                                      "pull-curve")
        ->required();
    fit->add_option("inputs", inputs, "Input files")->required();
    fit->fallthrough();
    auto* sim = app.add_subcommand("simulate", "Generate synthetic data");
    sim->add_option("kind", sim_kind, "spectrum, ringdown, trajectory")->required();
    sim->fallthrough();
    auto* cool = app.add_subcommand("cooling-curve", "Occupation versus pump power");
    cool->add_option("inputs", inputs, "Optional measured points (power_dbm, area[, sigma])");
    cool->fallthrough();
    auto* report = app.add_subcommand("report", "Consolidate configs and reports");
    report->add_option("inputs", inputs, "Config (.ini) and report (.json) files");
    report->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }
    if (!config.empty()) {
        opts.config = config;
    }
    opts.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    opts.plot = plot_kind == "svg" ? PlotFormat::svg : plot_kind == "png" ? PlotFormat::png : PlotFormat::none;
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    try {
        fs::create_directories(opts.out);
    } catch (const std::exception& e) {
        err << "error: cannot create output directory: " << e.what() << "\n";
        return exit_input_error;
    }

    if (*fit) {
        return cmd_fit(fit_kind, paths, opts, out, err);
    }
    if (*sim) {
        return cmd_simulate(sim_kind, opts, out, err);
    }
    if (*cool) {
        return cmd_cooling_curve(paths, opts, out, err);
    }
    return cmd_report(paths, opts, out, err);
}

} // namespace cemech::cli
