#include "cemech/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cemech/io.hpp"

namespace cemech {

namespace {

namespace pt = boost::property_tree;

/// Typed access to one section; remembers which keys were read.
class Section {
public:
    Section(const pt::ptree* tree, std::string name, std::string origin)
        : tree_(tree), name_(std::move(name)), origin_(std::move(origin))
    {
    }

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::optional<double> number(const std::string& key)
    {
        const auto text = string(key);
        if (!text) {
            return std::nullopt;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(*text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text->size() || !std::isfinite(v)) {
            fail(key, fmt::format("'{}' is not a finite number", *text));
        }
        return v;
    }

    double required(const std::string& key)
    {
        auto v = number(key);
        if (!v) {
            fail(key, "is required");
        }
        return *v;
    }

    std::optional<double> rate(const std::string& key_hz)
    {
        auto v = number(key_hz);
        return v ? std::optional<double>(hz_to_rad(*v)) : std::nullopt;
    }

    std::optional<std::string> string(const std::string& key)
    {
        if (!has(key)) {
            return std::nullopt;
        }
        used_.insert(key);
        return tree_->get<std::string>(key);
    }

    std::optional<bool> flag(const std::string& key)
    {
        const auto s = string(key);
        if (!s) {
            return std::nullopt;
        }
        if (*s == "true" || *s == "1" || *s == "yes") {
            return true;
        }
        if (*s == "false" || *s == "0" || *s == "no") {
            return false;
        }
        fail(key, fmt::format("'{}' is not a boolean (true/false)", *s));
    }

    std::optional<std::size_t> count(const std::string& key)
    {
        const auto v = number(key);
        if (!v) {
            return std::nullopt;
        }
        if (*v < 0.0 || std::floor(*v) != *v) {
            fail(key, "must be a non-negative integer");
        }
        return static_cast<std::size_t>(*v);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError(fmt::format("{}: [{}] {}: {}", origin_, name_, key, what));
    }

    void finish() const
    {
        if (!tree_) {
            return;
        }
        for (const auto& [key, value] : *tree_) {
            if (!used_.count(key)) {
                throw ConfigError(fmt::format("{}: [{}] unknown key '{}'", origin_, name_, key));
            }
        }
    }

    /// Wraps a validate() call so the message names the section.
    template <typename F>
    void check(F&& f) const
    {
        try {
            f();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: [{}] {}", origin_, name_, e.what()));
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::string origin_;
    std::set<std::string> used_;
};

} // namespace

PipelineConfig parse_config(const std::string& text, const std::string& origin)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
    }
    static const std::set<std::string> known = {"cavity",    "mechanics", "drive",   "environment", "noise",
                                                "coupling",  "pump",      "circuit", "spectrum",    "trajectory",
                                                "ringdown",  "sweep",     "cooling", "calibration", "fit"};
    PipelineConfig cfg;
    cfg.source = origin;
    for (const auto& [name, sub] : tree) {
        if (!known.count(name)) {
            throw ConfigError(fmt::format("{}: unknown section [{}]", origin, name));
        }
        if (sub.empty()) {
            throw ConfigError(fmt::format("{}: key '{}' outside any section", origin, name));
        }
        for (const auto& [key, value] : sub) {
            cfg.raw[name + "." + key] = value.get_value<std::string>();
        }
    }
    auto section = [&](const char* name) {
        const auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name, origin);
    };

    if (auto s = section("cavity"); s.present()) {
        CavityParams c;
        c.omega_c = s.rate("omega_c_hz").value_or(0.0);
        c.kappa = hz_to_rad(s.required("kappa_hz"));
        if (s.has("kappa_ex_hz")) {
            c.kappa_ex = hz_to_rad(s.required("kappa_ex_hz"));
        } else {
            c.kappa_ex = c.kappa * s.required("eta");
        }
        if (c.omega_c == 0.0) {
            // Only spectra relative to the pump need no carrier frequency.
            c.omega_c = std::numeric_limits<double>::quiet_NaN();
        }
        s.finish();
        s.check([&] {
            if (!(c.kappa > 0.0) || !(c.kappa_ex > 0.0) || c.kappa_ex > c.kappa) {
                throw std::invalid_argument("need 0 < kappa_ex <= kappa");
            }
        });
        cfg.cavity = c;
    }
    if (auto s = section("mechanics"); s.present()) {
        MechanicalMode m;
        m.omega_m = hz_to_rad(s.required("omega_m_hz"));
        m.gamma_m = hz_to_rad(s.required("gamma_m_hz"));
        m.mass = s.number("mass_kg");
        s.finish();
        s.check([&] { m.validate(); });
        cfg.mechanics = m;
    }
    if (auto s = section("drive"); s.present()) {
        Drive d;
        d.attenuation_db = s.number("attenuation_db").value_or(0.0);
        if (s.has("power_w")) {
            d.power_at_device = s.required("power_w");
        } else if (s.has("power_dbm")) {
            d.power_at_device = dbm_to_watts(s.required("power_dbm"));
        } else if (s.has("source_power_dbm")) {
            d.power_at_device = dbm_to_watts(attenuate_dbm(s.required("source_power_dbm"), d.attenuation_db));
        }
        d.detuning = hz_to_rad(s.number("detuning_hz").value_or(0.0));
        s.finish();
        s.check([&] { d.validate(); });
        cfg.drive = d;
    }
    if (auto s = section("environment"); s.present()) {
        Environment e{s.required("temperature_k")};
        s.finish();
        s.check([&] { e.validate(); });
        cfg.environment = e;
    }
    if (auto s = section("noise"); s.present()) {
        NoiseBudget n;
        n.n_add = s.number("n_add").value_or(0.0);
        n.n_c = s.number("n_c").value_or(0.0);
        n.n_0 = s.number("n_0").value_or(0.0);
        n.eta = s.number("eta").value_or(cfg.cavity ? cfg.cavity->eta() : 1.0);
        s.finish();
        s.check([&] { n.validate(); });
        cfg.noise = n;
    }
    if (auto s = section("coupling"); s.present()) {
        cfg.g0 = s.rate("g0_hz");
        s.finish();
    }
    if (auto s = section("pump"); s.present()) {
        PumpModel p;
        p.gamma_m = hz_to_rad(s.required("gamma_m_hz"));
        if (s.has("p0_w")) {
            p.p0 = s.required("p0_w");
        } else {
            p.p0 = dbm_to_watts(s.required("p0_dbm"));
        }
        s.finish();
        s.check([&] { p.validate(); });
        cfg.pump = p;
    }
    if (auto s = section("circuit"); s.present()) {
        // Only the pad area is mandatory: a pull-curve fit is how C_p and L
        // are found in the first place.
        CircuitModel c;
        c.pad_area = s.required("pad_area_m2");
        c.parasitic_capacitance = s.number("parasitic_capacitance_f").value_or(0.0);
        c.gap = s.number("gap_m").value_or(std::numeric_limits<double>::infinity());
        cfg.circuit_bare_frequency = s.rate("bare_frequency_hz");
        if (s.has("inductance_h")) {
            c.inductance = s.required("inductance_h");
        } else if (cfg.circuit_bare_frequency && c.parasitic_capacitance > 0.0) {
            c.inductance = inductance_from_bare_resonance(*cfg.circuit_bare_frequency, c.parasitic_capacitance);
        }
        if (auto pm = s.string("plate_model")) {
            if (*pm == "series_half_pads") {
                c.plate_model = PlateModel::series_half_pads;
            } else if (*pm == "single_plate") {
                c.plate_model = PlateModel::single_plate;
            } else {
                s.fail("plate_model", "must be series_half_pads or single_plate");
            }
        }
        s.finish();
        if (!(c.pad_area > 0.0) || c.inductance < 0.0 || c.parasitic_capacitance < 0.0 || !(c.gap > 0.0)) {
            s.fail("pad_area_m2", "pad area and gap must be positive, L and C_p non-negative");
        }
        cfg.circuit = c;
    }
    if (auto s = section("spectrum"); s.present()) {
        SpectrumSettings sp;
        sp.start_hz = s.required("start_hz");
        sp.stop_hz = s.required("stop_hz");
        sp.points = s.count("points").value_or(1001);
        if (auto m = s.string("model")) {
            if (*m != "rwa" && *m != "full") {
                s.fail("model", "must be rwa or full");
            }
            sp.full_model = *m == "full";
        }
        sp.coupling = s.rate("g_hz");
        s.finish();
        if (!(sp.stop_hz > sp.start_hz) || sp.points < 2) {
            s.fail("stop_hz", "need stop_hz > start_hz and at least 2 points");
        }
        cfg.spectrum = sp;
    }
    if (auto s = section("trajectory"); s.present()) {
        TrajectorySettings t;
        t.gamma_eff = hz_to_rad(s.required("gamma_eff_hz"));
        t.omega_offset = hz_to_rad(s.number("offset_hz").value_or(0.0));
        t.occupation = s.required("occupation");
        t.sample_rate = s.required("sample_rate_hz");
        t.duration = s.required("duration_s");
        t.segment = s.count("segment").value_or(4096);
        t.overlap = s.number("overlap").value_or(0.5);
        s.finish();
        if (!(t.gamma_eff > 0.0) || !(t.occupation >= 0.0) || !(t.sample_rate > 0.0) || !(t.duration > 0.0)) {
            s.fail("gamma_eff_hz", "rates, occupation, sample rate and duration must be positive");
        }
        if (!(t.overlap >= 0.0 && t.overlap < 1.0)) {
            s.fail("overlap", "must lie in [0, 1)");
        }
        cfg.trajectory = t;
    }
    if (auto s = section("ringdown"); s.present()) {
        RingdownSettings r;
        auto& p = r.protocol;
        p.excite_duration = s.number("excite_s").value_or(0.0);
        p.amplify_duration = s.number("amplify_s").value_or(0.0);
        p.decay_duration = s.required("decay_s");
        p.excite_rate = s.number("excite_rate_per_s").value_or(0.0);
        p.gamma_blue = hz_to_rad(s.number("gamma_blue_hz").value_or(0.0));
        p.gamma_red = hz_to_rad(s.required("gamma_red_hz"));
        p.initial_amplitude = s.number("initial_amplitude").value_or(0.0);
        p.frequency_offset_hz = s.number("offset_hz").value_or(0.0);
        p.drift_hz_per_s = s.number("drift_hz_per_s").value_or(0.0);
        r.sample_rate = s.required("sample_rate_hz");
        r.noise_sigma = s.number("noise_sigma").value_or(0.0);
        r.write_binary = s.flag("binary").value_or(false);
        s.finish();
        s.check([&] { p.validate(); });
        cfg.ringdown = r;
    }
    if (auto s = section("sweep"); s.present()) {
        SweepSettings w;
        w.start_dbm = s.required("start_dbm");
        w.stop_dbm = s.required("stop_dbm");
        w.points = s.count("points").value_or(201);
        s.finish();
        if (!(w.stop_dbm > w.start_dbm) || w.points < 2) {
            s.fail("stop_dbm", "need stop_dbm > start_dbm and at least 2 points");
        }
        cfg.sweep = w;
    }
    if (auto s = section("cooling"); s.present()) {
        CoolingSettings c;
        c.noise_slope = s.required("noise_slope_per_w");
        c.noise_slope_err = s.number("noise_slope_err_per_w").value_or(0.0);
        c.p0_err = s.number("p0_err_w").value_or(0.0);
        c.n_th = s.number("n_th");
        s.finish();
        if (c.noise_slope < 0.0 || c.noise_slope_err < 0.0 || c.p0_err < 0.0) {
            s.fail("noise_slope_per_w", "slopes and errors must be non-negative");
        }
        cfg.cooling = c;
    }
    if (auto s = section("calibration"); s.present()) {
        auto& c = cfg.calibration;
        c.quanta_per_area = s.number("quanta_per_area");
        c.quanta_per_area_err = s.number("quanta_per_area_err").value_or(0.0);
        c.bath_temperature = s.number("bath_temperature_k");
        s.finish();
        if (c.quanta_per_area && !(*c.quanta_per_area > 0.0)) {
            s.fail("quanta_per_area", "must be positive");
        }
    }
    if (auto s = section("fit"); s.present()) {
        auto& f = cfg.fit;
        f.threshold.threshold = s.number("threshold_k").value_or(f.threshold.threshold);
        f.threshold.include_below = s.flag("include_below").value_or(false);
        f.pm_depth = s.number("pm_depth_rad").value_or(0.0);
        f.omega_mod = hz_to_rad(s.number("mod_frequency_hz").value_or(0.0));
        f.snr_threshold = s.number("snr_threshold").value_or(f.snr_threshold);
        if (auto w = s.string("weighting")) {
            if (*w == "additive") {
                f.weighting = DecayWeighting::additive;
            } else if (*w == "relative") {
                f.weighting = DecayWeighting::relative;
            } else {
                s.fail("weighting", "must be additive or relative");
            }
        }
        f.overcoupled_hint = s.flag("overcoupled");
        f.ringdown_start = s.number("ringdown_start_s");
        f.smoothing_window = s.number("smoothing_window_s").value_or(f.smoothing_window);
        f.tls_reference = s.number("tls_reference_k");
        s.finish();
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.string());
}

} // namespace cemech
