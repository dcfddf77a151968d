#pragma once

// Pipeline configuration: a sectioned INI-style file whose physical values
// carry their unit in the key name, e.g.
//
//   [mechanics]
//   omega_m_hz = 1.486e6
//   gamma_m_hz = 1.0e-3
//   mass_kg = 15e-12
//
// Frequencies are read in Hz (ordinary, not angular) and converted to rad/s
// here; nothing downstream sees Hz. Unknown sections or keys are errors.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "cemech/backaction.hpp"
#include "cemech/circuit.hpp"
#include "cemech/core.hpp"
#include "cemech/estimate.hpp"
#include "cemech/spectrum.hpp"
#include "cemech/timedomain.hpp"

namespace cemech {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumSettings {
    double start_hz = 0.0; // pump-relative grid
    double stop_hz = 0.0;
    std::size_t points = 0;
    bool full_model = false;
    std::optional<double> coupling; // g, rad/s; otherwise g0 sqrt(n) from the drive
};

struct TrajectorySettings {
    double gamma_eff = 0.0;    // rad/s
    double omega_offset = 0.0; // rad/s
    double occupation = 0.0;
    double sample_rate = 0.0; // Hz
    double duration = 0.0;    // s
    std::size_t segment = 4096;
    double overlap = 0.5;
};

struct RingdownSettings {
    RingdownProtocol protocol;
    double sample_rate = 0.0;  // Hz
    double noise_sigma = 0.0;  // white noise on I and Q combined
    bool write_binary = false;
};

struct SweepSettings {
    double start_dbm = 0.0;
    double stop_dbm = 0.0;
    std::size_t points = 0;
};

struct CoolingSettings {
    double noise_slope = 0.0;     // n~ per W at the device
    double noise_slope_err = 0.0;
    double p0_err = 0.0;           // W
    std::optional<double> n_th;    // overrides the environment temperature
};

struct CalibrationSettings {
    std::optional<double> quanta_per_area;
    double quanta_per_area_err = 0.0;
    std::optional<double> bath_temperature; // K
};

struct FitSettings {
    ThresholdOptions threshold;
    double pm_depth = 0.0;       // rad
    double omega_mod = 0.0;      // rad/s
    double snr_threshold = 5.0;
    DecayWeighting weighting = DecayWeighting::additive;
    std::optional<bool> overcoupled_hint;
    std::optional<double> ringdown_start; // s; default is the energy maximum
    double smoothing_window = 1.0;        // s, for drift
    std::optional<double> tls_reference;  // K
};

struct PipelineConfig {
    std::optional<CavityParams> cavity;
    std::optional<MechanicalMode> mechanics;
    std::optional<Drive> drive;
    std::optional<Environment> environment;
    std::optional<NoiseBudget> noise;
    std::optional<double> g0; // rad/s
    std::optional<PumpModel> pump;
    std::optional<CircuitModel> circuit;
    std::optional<double> circuit_bare_frequency; // rad/s, for deriving L
    std::optional<SpectrumSettings> spectrum;
    std::optional<TrajectorySettings> trajectory;
    std::optional<RingdownSettings> ringdown;
    std::optional<SweepSettings> sweep;
    std::optional<CoolingSettings> cooling;
    CalibrationSettings calibration;
    FitSettings fit;

    /// Every key as written ("section.key" -> text), for reports.
    std::map<std::string, std::string> raw;
    std::string source;
};

PipelineConfig parse_config(const std::string& text, const std::string& origin = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

} // namespace cemech
