#pragma once

// Batch commands behind the `cemech` executable. Each command returns the
// process exit code: 0 success, 1 input error (I/O, parse, config), 2 a fit
// or numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cemech/config.hpp"
#include "cemech/fit_report.hpp"

namespace cemech::cli {

enum ExitCode : int { exit_ok = 0, exit_input_error = 1, exit_fit_failure = 2 };

enum class OutputFormat { csv, json };
enum class PlotFormat { none, svg, png };

struct Options {
    std::optional<std::filesystem::path> config;
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
    OutputFormat format = OutputFormat::json;
    PlotFormat plot = PlotFormat::none;
};

/// A derived number together with the operation and inputs behind it.
struct Derived {
    double value = 0.0;
    double error = 0.0; // 1 sigma, 0 when not propagated
    std::string unit;
    std::string operation;
    std::vector<std::string> inputs;
};

struct Parameter {
    double value = 0.0;
    std::string unit;
    std::string source;
};

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // path, sha256
    std::string digest;
    std::uint64_t seed = 0;
    std::map<std::string, FitReport> fits;
    std::map<std::string, Parameter> parameters;
    std::map<std::string, Derived> derived;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    int exit_code = exit_ok;

    nlohmann::json to_json() const;
};

int cmd_fit(const std::string& kind, const std::vector<std::filesystem::path>& inputs, const Options& options,
            std::ostream& out, std::ostream& err);

int cmd_simulate(const std::string& kind, const Options& options, std::ostream& out, std::ostream& err);

/// Optional inputs are measured points (power_dbm or power_w, area[, sigma]).
int cmd_cooling_curve(const std::vector<std::filesystem::path>& inputs, const Options& options, std::ostream& out,
                      std::ostream& err);

/// Inputs are configs (.ini) and reports written by the other commands (.json).
int cmd_report(const std::vector<std::filesystem::path>& inputs, const Options& options, std::ostream& out,
               std::ostream& err);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cemech::cli
