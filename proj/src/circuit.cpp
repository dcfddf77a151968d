#include "cemech/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cemech/estimate.hpp"

namespace cemech {

namespace {

double plate_factor(PlateModel model)
{
    return model == PlateModel::series_half_pads ? 0.25 : 1.0;
}

} // namespace

double CircuitModel::membrane_capacitance() const
{
    return cemech::membrane_capacitance(gap, pad_area, plate_model);
}

double CircuitModel::participation() const
{
    return participation_ratio(membrane_capacitance(), parasitic_capacitance);
}

void CircuitModel::validate() const
{
    if (!(inductance > 0.0) || !(parasitic_capacitance > 0.0) || !(pad_area > 0.0) || !(gap > 0.0)) {
        throw std::invalid_argument("CircuitModel: inductance, parasitic capacitance, pad area and gap must be positive");
    }
}

double membrane_capacitance(double gap, double area, PlateModel model)
{
    if (!(gap > 0.0)) {
        throw std::invalid_argument("membrane_capacitance: gap must be positive");
    }
    if (!(area >= 0.0)) {
        throw std::invalid_argument("membrane_capacitance: area must be non-negative");
    }
    if (std::isinf(gap)) {
        return 0.0;
    }
    return plate_factor(model) * PhysicalConstants::epsilon0 * area / gap;
}

double resonance_frequency(double gap, const CircuitModel& model)
{
    if (!(model.inductance > 0.0) || !(model.parasitic_capacitance >= 0.0)) {
        throw std::invalid_argument("resonance_frequency: need L > 0 and C_p >= 0");
    }
    const double c = membrane_capacitance(gap, model.pad_area, model.plate_model) + model.parasitic_capacitance;
    if (!(c > 0.0)) {
        throw std::invalid_argument("resonance_frequency: total capacitance is zero");
    }
    return 1.0 / std::sqrt(c * model.inductance);
}

double bare_resonance(const CircuitModel& model)
{
    return resonance_frequency(std::numeric_limits<double>::infinity(), model);
}

double inductance_from_bare_resonance(double omega_bare, double parasitic_capacitance)
{
    if (!(omega_bare > 0.0) || !(parasitic_capacitance > 0.0)) {
        throw std::invalid_argument("inductance_from_bare_resonance: inputs must be positive");
    }
    return 1.0 / (omega_bare * omega_bare * parasitic_capacitance);
}

double participation_ratio(double c_m, double c_p)
{
    if (!(c_m >= 0.0) || !(c_p >= 0.0) || c_m + c_p == 0.0) {
        throw std::invalid_argument("participation_ratio: capacitances must be non-negative, not both zero");
    }
    return c_m / (c_m + c_p);
}

GapSolution gap_from_frequency(double omega_r, const CircuitModel& model)
{
    if (!(omega_r > 0.0) || !(model.inductance > 0.0) || !(model.pad_area > 0.0)) {
        throw std::invalid_argument("gap_from_frequency: need omega_r, L and pad area positive");
    }
    const double c_m = 1.0 / (omega_r * omega_r * model.inductance) - model.parasitic_capacitance;
    const double bare = bare_resonance(model);
    if (omega_r == bare || c_m == 0.0) {
        return {GapStatus::unbounded, std::numeric_limits<double>::infinity()};
    }
    if (c_m < 0.0) {
        return {GapStatus::no_solution, 0.0};
    }
    return {GapStatus::finite, plate_factor(model.plate_model) * PhysicalConstants::epsilon0 * model.pad_area / c_m};
}

FitReport fit_pull_curve(std::span<const PullPoint> points, double pad_area, PlateModel model)
{
    if (!(pad_area > 0.0)) {
        throw std::invalid_argument("fit_pull_curve: pad area must be positive");
    }
    if (points.size() < 3) {
        throw std::invalid_argument("fit_pull_curve: need at least 3 points, got " + std::to_string(points.size()));
    }
    std::vector<double> gaps;
    for (const auto& p : points) {
        if (!(p.gap > 0.0) || !(p.omega_r > 0.0) || p.sigma < 0.0) {
            throw std::invalid_argument("fit_pull_curve: gaps and frequencies must be positive");
        }
        gaps.push_back(p.gap);
    }
    std::sort(gaps.begin(), gaps.end());
    if (std::unique(gaps.begin(), gaps.end()) - gaps.begin() < 3) {
        throw std::invalid_argument("fit_pull_curve: need at least 3 distinct gaps");
    }

    // Natural units: fF, nH, and frequencies relative to the data mean.
    constexpr double ff = 1e-15;
    constexpr double nh = 1e-9;
    std::vector<double> cm, w, s;
    double w_mean = 0.0;
    for (const auto& p : points) {
        w_mean += p.omega_r / static_cast<double>(points.size());
    }
    for (const auto& p : points) {
        cm.push_back(membrane_capacitance(p.gap, pad_area, model) / ff);
        w.push_back(p.omega_r / w_mean);
    }
    const bool weighted = std::all_of(points.begin(), points.end(), [](const PullPoint& p) { return p.sigma > 0.0; });
    if (weighted) {
        for (const auto& p : points) {
            s.push_back(p.sigma / w_mean);
        }
    }

    // 1 / w^2 = L C_m + L C_p is affine in C_m.
    std::vector<double> inv2;
    for (double v : w) {
        inv2.push_back(1.0 / (v * v));
    }
    const FitReport line = fit_affine(cm, inv2);
    const double unit_l = 1.0 / (w_mean * w_mean * ff * nh); // converts scaled slope to nH
    double l0 = line.values[0] * unit_l;
    double cp0 = line.values[1] / line.values[0];
    if (!line.converged || !(l0 > 0.0) || !(cp0 > 0.0)) {
        l0 = 1.0 / (w_mean * w_mean * (cm.front() * ff + 1e-13)) / nh;
        cp0 = 100.0;
    }

    const CurveModel curve = [&](double c, std::span<const double> p) {
        return 1.0 / (std::sqrt((c + p[0]) * p[1] / unit_l));
    };
    FitReport internal = nlls_fit(curve, cm, w, s, {"c_p", "inductance"}, {cp0, l0});
    FitReport rep = reparametrize(internal, {"c_p", "inductance"}, [&](std::span<const double> p) {
        return std::vector<double>{p[0] * ff, p[1] * nh};
    });
    if (rep.converged && (!(rep.values[0] > 0.0) || !(rep.values[1] > 0.0))) {
        rep.converged = false;
        rep.stop_reason = "non-physical";
        rep.diagnostics.push_back("fitted C_p or L is not positive");
    }
    return rep;
}

double zero_point_fluctuation(const MechanicalMode& mode)
{
    if (!mode.mass || !(*mode.mass > 0.0)) {
        throw std::invalid_argument("zero_point_fluctuation: mode mass is required");
    }
    if (!(mode.omega_m > 0.0)) {
        throw std::invalid_argument("zero_point_fluctuation: omega_m must be positive");
    }
    return std::sqrt(PhysicalConstants::hbar / (2.0 * *mode.mass * mode.omega_m));
}

double g0_from_geometry(double omega_r, double participation, double gap, const MechanicalMode& mode)
{
    if (!(gap > 0.0)) {
        throw std::invalid_argument("g0_from_geometry: gap must be positive");
    }
    if (!(participation >= 0.0) || participation > 1.0) {
        throw std::invalid_argument("g0_from_geometry: participation must lie in [0, 1]");
    }
    return 0.5 * omega_r * participation * zero_point_fluctuation(mode) / gap;
}

} // namespace cemech
