#pragma once

#include <vector>

#include "nmor/common.hpp"

namespace nmor {

// Phenomenology of the magnetometer cell: saturated vapor density, absorption,
// and the rotation-vs-field response with its power-gated narrow resonance.

struct CellParams {
    double temperature_c = 40.0;
    double length_m = 0.075;
    // Effective absorption cross-section, anchored so a 5.4e11 cm^-3 cell of
    // default length transmits exactly 6/7 of the light.
    double sigma_cm2 = std::log(7.0 / 6.0) / (5.4e11 * 7.5);
    double broad_width_t = 50e-6;
    double narrow_width_t = 3e-6;
    double broad_amp_rad = 2e-3;
    double narrow_amp_rad = 6.7e-4;
    // Rotation amplitudes are quoted at this density; they scale as
    // N*transmission(N) away from it.
    double amp_ref_density_cm3 = 6e10;
    double narrow_sat_power_w = 1.5e-3;   // logistic gate center
    double narrow_sat_width_w = 1.2e-4;   // logistic gate width
    double narrow_broadening_w = 24e-3;   // power-broadening scale of the narrow term
    double asym = 0.15;
};

struct ResponseCurve {
    std::vector<double> b_values_t;
    std::vector<double> phi_values_rad;
    double slope_rad_per_t = 0.0;
};

// Saturated-vapor number density (cm^-3) for the given cell temperature.
// Valid for -20..200 C; throws domain_error outside.
double vapor_density(double temperature_c);

// Beer-Lambert transmission exp(-sigma * N * L).
double transmission(double density_cm3, const CellParams& cell);

// Rotation angle phi(B): broad dispersive S-curve plus a narrow zero-field
// resonance that a smooth power gate removes below narrow_sat_power_w.
double nmor_rotation(double b_t, const CellParams& cell, double density_cm3, double power_w);

// Steepest d(phi)/dB on the left flank of the narrow resonance (numerical
// derivative, searched over B in [-2*narrow_width, 0]).
double response_slope(const CellParams& cell, double density_cm3, double power_w);

// Rotation produced by a unit relative power fluctuation, kappa = P*dphi/dP,
// evaluated at the operating bias half a narrow width into the left flank.
double rin_coupling(double density_cm3, double power_w, const CellParams& cell);

// Samples phi(B) on a uniform grid and annotates the slope.
ResponseCurve response_curve(const CellParams& cell, double density_cm3, double power_w,
                             double b_min_t, double b_max_t, int n_points);

// Smooth saturation gate applied to the narrow-resonance amplitude,
// normalized to ~1 at the 6 mW reference power. Exposed for tests.
double narrow_gate(double power_w, const CellParams& cell);

}  // namespace nmor
