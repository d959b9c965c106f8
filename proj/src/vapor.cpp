#include "nmor/vapor.hpp"

namespace nmor {

namespace {

// log10(N/cm^-3) = A - B/T_K, least-squares fit to the measured density
// ladder between 25 C (1.3e10) and 70 C (7.4e11).
constexpr double kDensityA = 23.500525;
constexpr double kDensityB = 3988.8848;

constexpr double kGateRefPower = 6e-3;  // power at which narrow_amp_rad is quoted

double dispersive(double u) { return u / (1.0 + u * u); }

// Amplitude scale: rotation grows with the number of atoms but the probe that
// carries it is absorbed, so both resonances scale as N*transmission(N),
// normalized at the reference density.
double amplitude_scale(double density_cm3, const CellParams& cell) {
    const double ref = cell.amp_ref_density_cm3;
    return (density_cm3 * transmission(density_cm3, cell)) / (ref * transmission(ref, cell));
}

}  // namespace

double vapor_density(double temperature_c) {
    if (temperature_c < -20.0 || temperature_c > 200.0)
        throw domain_error("vapor_density: temperature outside -20..200 C");
    const double t_k = temperature_c + 273.15;
    return std::pow(10.0, kDensityA - kDensityB / t_k);
}

double transmission(double density_cm3, const CellParams& cell) {
    if (density_cm3 < 0.0) throw domain_error("transmission: negative density");
    return std::exp(-cell.sigma_cm2 * density_cm3 * cell.length_m * 100.0);
}

double narrow_gate(double power_w, const CellParams& cell) {
    const double logistic =
        1.0 / (1.0 + std::exp(-(power_w - cell.narrow_sat_power_w) / cell.narrow_sat_width_w));
    const double sat = power_w / (power_w + cell.narrow_broadening_w);
    const double sat_ref = kGateRefPower / (kGateRefPower + cell.narrow_broadening_w);
    return logistic * sat / sat_ref;
}

double nmor_rotation(double b_t, const CellParams& cell, double density_cm3, double power_w) {
    if (power_w < 0.0) throw domain_error("nmor_rotation: negative power");
    const double scale = amplitude_scale(density_cm3, cell);
    const double ub = b_t / cell.broad_width_t;
    const double un = b_t / cell.narrow_width_t;
    const double broad = cell.broad_amp_rad * dispersive(ub);
    const double narrow = cell.narrow_amp_rad * narrow_gate(power_w, cell) * dispersive(un) *
                          (1.0 + cell.asym * un);
    return scale * (broad + narrow);
}

double response_slope(const CellParams& cell, double density_cm3, double power_w) {
    if (density_cm3 <= 0.0) return 0.0;
    // Steepest numerical derivative on the left flank of the narrow feature.
    const double lo = -2.0 * cell.narrow_width_t;
    const int n = 400;
    const double h = cell.narrow_width_t * 1e-4;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double b = lo + (0.0 - lo) * i / n;
        const double d = (nmor_rotation(b + h, cell, density_cm3, power_w) -
                          nmor_rotation(b - h, cell, density_cm3, power_w)) /
                         (2.0 * h);
        if (d > best) best = d;
    }
    return best;
}

double rin_coupling(double density_cm3, double power_w, const CellParams& cell) {
    if (density_cm3 <= 0.0 || power_w <= 0.0) return 0.0;
    const double b_op = -0.5 * cell.narrow_width_t;  // operating bias on the left flank
    const double h = 1e-4 * power_w;
    const double dphi_dp = (nmor_rotation(b_op, cell, density_cm3, power_w + h) -
                            nmor_rotation(b_op, cell, density_cm3, power_w - h)) /
                           (2.0 * h);
    return power_w * dphi_dp;
}

ResponseCurve response_curve(const CellParams& cell, double density_cm3, double power_w,
                             double b_min_t, double b_max_t, int n_points) {
    if (n_points < 2) throw domain_error("response_curve: need at least 2 points");
    if (b_max_t <= b_min_t) throw domain_error("response_curve: empty field range");
    ResponseCurve rc;
    rc.b_values_t.resize(n_points);
    rc.phi_values_rad.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double b = b_min_t + (b_max_t - b_min_t) * i / (n_points - 1);
        rc.b_values_t[i] = b;
        rc.phi_values_rad[i] = nmor_rotation(b, cell, density_cm3, power_w);
    }
    rc.slope_rad_per_t = response_slope(cell, density_cm3, power_w);
    return rc;
}

}  // namespace nmor
