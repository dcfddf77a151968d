#pragma once

// File formats used by the command-line tools.
//
// CSV: one header line, comma separated, numeric cells, SI-suffixed column
// names (frequency_hz, time_s, temperature_k, power_dbm, ...). Lines starting
// with '#' and blank lines are skipped.
//
// Binary time traces (little-endian):
//   char[8]  magic "CEMTRACE"
//   uint32   version (1)
//   uint32   kind (0 complex amplitude, 1 real)
//   float64  sample rate, Hz
//   float64  t0, s
//   uint64   sample count N
//   float64  I0, Q0, I1, Q1, ... (2N values)

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cemech/circuit.hpp"
#include "cemech/cooling.hpp"
#include "cemech/estimate.hpp"
#include "cemech/spectrum.hpp"
#include "cemech/timedomain.hpp"

namespace cemech::io {

/// Malformed input; `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers; // source line of each row
    std::string path;

    bool has(const std::string& column) const;
    std::size_t index(const std::string& column) const;
    std::vector<double> column(const std::string& name) const;
    /// First of `names` present in the header.
    std::optional<std::string> first_of(std::initializer_list<const char*> names) const;
};

Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text, const std::string& origin);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& column_data);

SpectrumTrace read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumTrace& trace);

TimeTrace read_timetrace_csv(const std::filesystem::path& path);
void write_timetrace_csv(const std::filesystem::path& path, const TimeTrace& trace);
TimeTrace read_timetrace_binary(const std::filesystem::path& path);
void write_timetrace_binary(const std::filesystem::path& path, const TimeTrace& trace);
/// Dispatches on the extension: ".bin" binary, anything else CSV.
TimeTrace read_timetrace(const std::filesystem::path& path);

S11Trace read_s11_csv(const std::filesystem::path& path, bool& magnitude_only);
std::vector<PowerRatePoint> read_power_rate_csv(const std::filesystem::path& path);
std::vector<RatePoint> read_rate_csv(const std::filesystem::path& path);
std::vector<ThermalPoint> read_thermal_csv(const std::filesystem::path& path);
std::vector<RatioPoint> read_ratio_csv(const std::filesystem::path& path);
std::vector<PullPoint> read_pull_csv(const std::filesystem::path& path);

nlohmann::json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpectrumTrace& trace);
nlohmann::json to_json(const CoolingCurve& curve);
nlohmann::json to_json(const CircuitModel& model);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

} // namespace cemech::io
