#pragma once

// Lumped flip-chip LC model: a compliant membrane capacitance C_m(d) in
// parallel with a parasitic C_p, closed by an inductance L.

#include <span>

#include "cemech/core.hpp"
#include "cemech/fit_report.hpp"

namespace cemech {

enum class PlateModel {
    series_half_pads, // pad bridges two half-area electrodes: eps0 A / (4 d)
    single_plate,     // eps0 A / d
};

struct CircuitModel {
    double inductance = 0.0;            // H
    double parasitic_capacitance = 0.0; // F
    double pad_area = 0.0;              // m^2
    double gap = 0.0;                   // m
    PlateModel plate_model = PlateModel::series_half_pads;

    double membrane_capacitance() const;
    double participation() const; // C_m / (C_m + C_p)
    void validate() const;
};

double membrane_capacitance(double gap, double area, PlateModel model = PlateModel::series_half_pads);

/// 1 / sqrt((C_m(d) + C_p) L), rad/s. The model's own gap is ignored.
double resonance_frequency(double gap, const CircuitModel& model);

/// 1 / sqrt(C_p L): the loop without the membrane.
double bare_resonance(const CircuitModel& model);

/// L from a bare-loop resonance and C_p.
double inductance_from_bare_resonance(double omega_bare, double parasitic_capacitance);

double participation_ratio(double c_m, double c_p);

enum class GapStatus { finite, unbounded, no_solution };

struct GapSolution {
    GapStatus status = GapStatus::no_solution;
    double gap = 0.0; // m, only meaningful when finite
};

GapSolution gap_from_frequency(double omega_r, const CircuitModel& model);

struct PullPoint {
    double gap = 0.0;     // m
    double omega_r = 0.0; // rad/s
    double sigma = 0.0;   // rad/s, 0 for unit weights
};

/// Fits C_p and L to a pull curve. Parameters {c_p, inductance} in F and H.
FitReport fit_pull_curve(std::span<const PullPoint> points, double pad_area,
                         PlateModel model = PlateModel::series_half_pads);

/// (omega_r / 2) p x_zpf / d with x_zpf = sqrt(hbar / (2 m omega_m)).
double g0_from_geometry(double omega_r, double participation, double gap, const MechanicalMode& mode);

double zero_point_fluctuation(const MechanicalMode& mode);

} // namespace cemech
