#include "cemech/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace cemech::io {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary trace I/O assumes a little-endian host");

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", path, line, what) : fmt::format("{}: {}", path, what)),
      line_(line)
{
}

bool Table::has(const std::string& column) const
{
    return std::find(columns.begin(), columns.end(), column) != columns.end();
}

std::size_t Table::index(const std::string& column) const
{
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end()) {
        throw ParseError(path, 1, fmt::format("missing column '{}'", column));
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const
{
    const auto j = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r[j]);
    }
    return out;
}

std::optional<std::string> Table::first_of(std::initializer_list<const char*> names) const
{
    for (const char* n : names) {
        if (has(n)) {
            return std::string(n);
        }
    }
    return std::nullopt;
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                             : comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

void require(const Table& t, std::initializer_list<const char*> names)
{
    for (const char* n : names) {
        t.index(n);
    }
}

void require_rows(const Table& t, std::size_t n)
{
    if (t.rows.size() < n) {
        throw ParseError(t.path, 0, fmt::format("need at least {} data rows, found {}", n, t.rows.size()));
    }
}

} // namespace

Table parse_csv(const std::string& text, const std::string& origin)
{
    Table t;
    t.path = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') {
            continue;
        }
        auto cells = split(s);
        if (!header) {
            for (auto& c : cells) {
                if (c.empty()) {
                    throw ParseError(origin, lineno, "empty column name in header");
                }
                std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::tolower(ch); });
                if (std::count(t.columns.begin(), t.columns.end(), c) > 0) {
                    throw ParseError(origin, lineno, fmt::format("duplicate column '{}'", c));
                }
                t.columns.push_back(c);
            }
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw ParseError(origin, lineno,
                             fmt::format("expected {} fields, found {}", t.columns.size(), cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto& c = cells[j];
            const char* first = c.data();
            const char* last = c.data() + c.size();
            if (!c.empty() && *first == '+') {
                ++first;
            }
            const auto [ptr, ec] = std::from_chars(first, last, row[j]);
            if (c.empty() || ec != std::errc() || ptr != last || !std::isfinite(row[j])) {
                throw ParseError(origin, lineno,
                                 fmt::format("column '{}': '{}' is not a finite number", t.columns[j], c));
            }
        }
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (!header) {
        throw ParseError(origin, 0, "no header line");
    }
    return t;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(fmt::format("{}: cannot open for reading", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
    }
    out << content;
    if (!out) {
        throw std::runtime_error(fmt::format("{}: write failed", path.string()));
    }
}

Table read_csv(const fs::path& path)
{
    return parse_csv(read_file(path), path.string());
}

void write_csv(const fs::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& column_data)
{
    if (columns.size() != column_data.size()) {
        throw std::invalid_argument("write_csv: one data vector per column");
    }
    const std::size_t n = column_data.empty() ? 0 : column_data.front().size();
    for (const auto& c : column_data) {
        if (c.size() != n) {
            throw std::invalid_argument("write_csv: columns differ in length");
        }
    }
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out += (j ? "," : "") + columns[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) {
                out += ',';
            }
            out += fmt::format("{:.17g}", column_data[j][i]);
        }
        out += '\n';
    }
    write_file(path, out);
}

SpectrumTrace read_spectrum_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    SpectrumTrace s;
    const auto fcol = t.first_of({"frequency_hz", "frequency_abs_hz"});
    if (!fcol) {
        throw ParseError(t.path, 1, "missing column 'frequency_hz'");
    }
    s.reference = *fcol == "frequency_hz" ? FrequencyReference::pump_relative : FrequencyReference::absolute;
    std::string vcol;
    for (const auto& c : t.columns) {
        if (c.rfind("psd", 0) == 0) {
            vcol = c;
            break;
        }
    }
    if (vcol.empty()) {
        throw ParseError(t.path, 1, "missing spectral density column (psd_quanta, psd_w_per_hz or psd_*)");
    }
    s.unit = vcol == "psd_quanta"    ? SpectrumUnit::quanta
             : vcol == "psd_w_per_hz" ? SpectrumUnit::watts_per_hz
                                      : SpectrumUnit::arbitrary;
    require_rows(t, 2);
    s.frequencies_hz = t.column(*fcol);
    s.values = t.column(vcol);
    for (std::size_t i = 1; i < s.frequencies_hz.size(); ++i) {
        if (!(s.frequencies_hz[i] > s.frequencies_hz[i - 1])) {
            throw ParseError(t.path, t.line_numbers[i], "frequencies must be strictly increasing");
        }
    }
    s.metadata.source = path.string();
    return s;
}

void write_spectrum_csv(const fs::path& path, const SpectrumTrace& trace)
{
    const std::string fcol = trace.reference == FrequencyReference::absolute ? "frequency_abs_hz" : "frequency_hz";
    const std::string vcol = trace.unit == SpectrumUnit::quanta         ? "psd_quanta"
                             : trace.unit == SpectrumUnit::watts_per_hz ? "psd_w_per_hz"
                                                                        : "psd_arb";
    write_csv(path, {fcol, vcol}, {trace.frequencies_hz, trace.values});
}

TimeTrace read_timetrace_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    require(t, {"time_s"});
    require_rows(t, 2);
    TimeTrace tr;
    const auto time = t.column("time_s");
    const double dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
    if (!(dt > 0.0)) {
        throw ParseError(t.path, 0, "time_s must increase");
    }
    for (std::size_t i = 1; i < time.size(); ++i) {
        const double expected = time.front() + dt * static_cast<double>(i);
        if (std::abs(time[i] - expected) > 1e-6 * dt + 1e-12 * std::abs(expected)) {
            throw ParseError(t.path, t.line_numbers[i], "time_s is not uniformly sampled");
        }
    }
    tr.sample_rate = 1.0 / dt;
    tr.t0 = time.front();
    tr.source = path.string();
    if (t.has("i")) {
        const auto iv = t.column("i");
        const auto qv = t.has("q") ? t.column("q") : std::vector<double>(iv.size(), 0.0);
        tr.kind = SampleKind::complex_amplitude;
        for (std::size_t k = 0; k < iv.size(); ++k) {
            tr.samples.emplace_back(iv[k], qv[k]);
        }
    } else if (auto v = t.first_of({"value", "energy"})) {
        tr.kind = SampleKind::real;
        for (double x : t.column(*v)) {
            tr.samples.emplace_back(x, 0.0);
        }
    } else {
        throw ParseError(t.path, 1, "need columns i,q (complex amplitude) or value (real trace)");
    }
    return tr;
}

void write_timetrace_csv(const fs::path& path, const TimeTrace& trace)
{
    std::vector<double> t(trace.size()), re(trace.size()), im(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        t[k] = trace.time(k);
        re[k] = trace.samples[k].real();
        im[k] = trace.samples[k].imag();
    }
    if (trace.kind == SampleKind::real) {
        write_csv(path, {"time_s", "value"}, {t, re});
    } else {
        write_csv(path, {"time_s", "i", "q"}, {t, re, im});
    }
}

namespace {

constexpr char trace_magic[8] = {'C', 'E', 'M', 'T', 'R', 'A', 'C', 'E'};

template <typename T>
void put(std::string& out, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos, const std::string& origin)
{
    if (pos + sizeof(T) > in.size()) {
        throw ParseError(origin, 0, fmt::format("truncated binary trace at byte {}", pos));
    }
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

} // namespace

void write_timetrace_binary(const fs::path& path, const TimeTrace& trace)
{
    std::string out(trace_magic, sizeof trace_magic);
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, trace.kind == SampleKind::real ? 1u : 0u);
    put<double>(out, trace.sample_rate);
    put<double>(out, trace.t0);
    put<std::uint64_t>(out, trace.size());
    for (const auto& s : trace.samples) {
        put<double>(out, s.real());
        put<double>(out, s.imag());
    }
    write_file(path, out);
}

TimeTrace read_timetrace_binary(const fs::path& path)
{
    const std::string in = read_file(path);
    const std::string origin = path.string();
    if (in.size() < sizeof trace_magic || std::memcmp(in.data(), trace_magic, sizeof trace_magic) != 0) {
        throw ParseError(origin, 0, "not a binary trace (bad magic)");
    }
    std::size_t pos = sizeof trace_magic;
    const auto version = get<std::uint32_t>(in, pos, origin);
    if (version != 1) {
        throw ParseError(origin, 0, fmt::format("unsupported binary trace version {}", version));
    }
    const auto kind = get<std::uint32_t>(in, pos, origin);
    TimeTrace tr;
    tr.kind = kind == 1 ? SampleKind::real : SampleKind::complex_amplitude;
    tr.sample_rate = get<double>(in, pos, origin);
    tr.t0 = get<double>(in, pos, origin);
    const auto n = get<std::uint64_t>(in, pos, origin);
    if (n > (in.size() - pos) / 16) {
        throw ParseError(origin, 0, fmt::format("header claims {} samples, file holds fewer", n));
    }
    tr.samples.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double re = get<double>(in, pos, origin);
        const double im = get<double>(in, pos, origin);
        tr.samples.emplace_back(re, im);
    }
    tr.source = origin;
    try {
        tr.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(origin, 0, e.what());
    }
    return tr;
}

TimeTrace read_timetrace(const fs::path& path)
{
    return path.extension() == ".bin" ? read_timetrace_binary(path) : read_timetrace_csv(path);
}

S11Trace read_s11_csv(const fs::path& path, bool& magnitude_only)
{
    const Table t = read_csv(path);
    require(t, {"frequency_hz"});
    require_rows(t, 8);
    S11Trace s;
    s.frequencies_hz = t.column("frequency_hz");
    if (t.has("s11_re") && t.has("s11_im")) {
        magnitude_only = false;
        const auto re = t.column("s11_re");
        const auto im = t.column("s11_im");
        for (std::size_t i = 0; i < re.size(); ++i) {
            s.values.emplace_back(re[i], im[i]);
        }
    } else if (t.has("s11_mag")) {
        magnitude_only = true;
        for (double m : t.column("s11_mag")) {
            s.values.emplace_back(m, 0.0);
        }
    } else if (t.has("s11_db")) {
        magnitude_only = true;
        for (double d : t.column("s11_db")) {
            s.values.emplace_back(std::pow(10.0, d / 20.0), 0.0);
        }
    } else {
        throw ParseError(t.path, 1, "need columns s11_re,s11_im or s11_mag or s11_db");
    }
    return s;
}

std::vector<PowerRatePoint> read_power_rate_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    const auto pcol = t.first_of({"power_w", "power_dbm"});
    if (!pcol) {
        throw ParseError(t.path, 1, "missing column 'power_w' or 'power_dbm'");
    }
    require(t, {"gamma_eff_hz"});
    const auto p = t.column(*pcol);
    const auto g = t.column("gamma_eff_hz");
    const auto s = t.has("sigma_hz") ? t.column("sigma_hz") : std::vector<double>(p.size(), 0.0);
    std::vector<PowerRatePoint> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double w = *pcol == "power_w" ? p[i] : dbm_to_watts(p[i]);
        out.push_back({w, hz_to_rad(g[i]), hz_to_rad(s[i])});
    }
    return out;
}

std::vector<RatePoint> read_rate_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    require(t, {"temperature_k", "gamma_hz"});
    std::vector<RatePoint> out;
    for (const auto& r : t.rows) {
        out.push_back({r[t.index("temperature_k")], hz_to_rad(r[t.index("gamma_hz")])});
    }
    return out;
}

std::vector<ThermalPoint> read_thermal_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    require(t, {"temperature_k", "area"});
    std::vector<ThermalPoint> out;
    for (const auto& r : t.rows) {
        ThermalPoint p;
        p.temperature = r[t.index("temperature_k")];
        p.area = r[t.index("area")];
        p.correction = t.has("correction") ? r[t.index("correction")] : 1.0;
        p.sigma = t.has("sigma") ? r[t.index("sigma")] : 0.0;
        out.push_back(p);
    }
    return out;
}

std::vector<RatioPoint> read_ratio_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    require(t, {"temperature_k", "ratio"});
    std::vector<RatioPoint> out;
    for (const auto& r : t.rows) {
        out.push_back({r[t.index("temperature_k")], r[t.index("ratio")], t.has("sigma") ? r[t.index("sigma")] : 0.0});
    }
    return out;
}

std::vector<PullPoint> read_pull_csv(const fs::path& path)
{
    const Table t = read_csv(path);
    require(t, {"gap_m", "frequency_hz"});
    std::vector<PullPoint> out;
    for (const auto& r : t.rows) {
        out.push_back({r[t.index("gap_m")], hz_to_rad(r[t.index("frequency_hz")]),
                       t.has("sigma_hz") ? hz_to_rad(r[t.index("sigma_hz")]) : 0.0});
    }
    return out;
}

json to_json(const FitReport& r)
{
    json j;
    j["names"] = r.names;
    j["values"] = r.values;
    j["std_errors"] = r.std_errors;
    json cov = json::array();
    for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) {
            row.push_back(r.covariance(i, k));
        }
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["residual_rms"] = r.residual_rms;
    j["n_points"] = r.n_points;
    j["dof"] = r.dof;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["gradient_norm"] = r.gradient_norm;
    j["stop_reason"] = r.stop_reason;
    j["diagnostics"] = r.diagnostics;
    j["warnings"] = r.warnings;
    j["constants"] = r.constants;
    return j;
}

namespace {

double number_or_nan(const json& v)
{
    return v.is_number() ? v.get<double>() : std::nan("");
}

} // namespace

FitReport fit_report_from_json(const json& j)
{
    FitReport r;
    r.names = j.at("names").get<std::vector<std::string>>();
    for (const auto& v : j.at("values")) {
        r.values.push_back(number_or_nan(v));
    }
    for (const auto& v : j.at("std_errors")) {
        r.std_errors.push_back(number_or_nan(v));
    }
    const auto& cov = j.at("covariance");
    const auto n = static_cast<Eigen::Index>(cov.size());
    r.covariance.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            r.covariance(i, k) = number_or_nan(cov.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)));
        }
    }
    r.residual_rms = number_or_nan(j.value("residual_rms", json()));
    r.n_points = j.value("n_points", std::size_t{0});
    r.dof = j.value("dof", std::size_t{0});
    r.converged = j.value("converged", false);
    r.iterations = j.value("iterations", 0);
    r.gradient_norm = number_or_nan(j.value("gradient_norm", json()));
    r.stop_reason = j.value("stop_reason", std::string());
    r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.constants = j.value("constants", std::map<std::string, double>{});
    if (r.values.size() != r.names.size() || r.std_errors.size() != r.names.size() ||
        static_cast<std::size_t>(n) != r.names.size()) {
        throw std::runtime_error("fit report JSON: names, values, std_errors and covariance disagree in size");
    }
    return r;
}

json to_json(const SpectrumTrace& t)
{
    json j;
    j["frequencies_hz"] = t.frequencies_hz;
    j["values"] = t.values;
    j["reference"] = t.reference == FrequencyReference::absolute ? "absolute" : "pump_relative";
    j["unit"] = t.unit == SpectrumUnit::quanta         ? "quanta"
                : t.unit == SpectrumUnit::watts_per_hz ? "w_per_hz"
                                                       : "arbitrary";
    j["resolution_bandwidth_hz"] = t.metadata.resolution_bandwidth_hz;
    j["averages"] = t.metadata.averages;
    j["source"] = t.metadata.source;
    j["warnings"] = t.metadata.warnings;
    return j;
}

json to_json(const CoolingCurve& c)
{
    json pts = json::array();
    for (const auto& p : c.points) {
        pts.push_back({{"power_w", p.power},
                       {"power_dbm", p.power > 0.0 ? watts_to_dbm(p.power) : -INFINITY},
                       {"gamma_e_hz", rad_to_hz(p.gamma_e)},
                       {"n_tilde", p.n_tilde},
                       {"n_bar", p.n_bar}});
    }
    return {{"points", pts},
            {"min_index", c.min_index},
            {"n_min", c.n_min},
            {"p_opt_w", c.p_opt},
            {"p_opt_dbm", c.p_opt > 0.0 ? watts_to_dbm(c.p_opt) : -INFINITY}};
}

json to_json(const CircuitModel& m)
{
    return {{"inductance_h", m.inductance},
            {"parasitic_capacitance_f", m.parasitic_capacitance},
            {"pad_area_m2", m.pad_area},
            {"gap_m", m.gap},
            {"plate_model", m.plate_model == PlateModel::series_half_pads ? "series_half_pads" : "single_plate"}};
}

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += fmt::format("{:02x}", md[i]);
    }
    return out;
}

} // namespace cemech::io
