#pragma once

#include <vector>

#include "nmor/gaussian.hpp"
#include "nmor/vapor.hpp"

namespace nmor {

// Spectral noise budget of the balanced polarimeter: quantum (shot or
// squeezed) noise degraded by cell absorption, residual intensity noise both
// directly (finite CMRR) and converted through the atomic response, detector
// dark noise, and a density-dependent back-action excess on the squeezed probe.

enum class Probe { coherent, squeezed };

struct DarkPeak {
    double freq_hz = 0.0;
    double height_rel_sql = 0.0;  // at the 6 mW reference power
};

struct NoiseConfig {
    Probe probe = Probe::squeezed;
    // Relative-intensity PSD: rin_level*(1 + (knee/f)^3 / (1 + (corner/f)^2)).
    // Flat far above the knee, ~f^-3 technical noise below it, softened to
    // ~f^-1 under the corner.
    double rin_level = 4e-16;       // 1/Hz
    double rin_corner_hz = 20e3;
    double rin_knee_hz = 2e5;
    double cmrr_db = 25.0;
    bool balanced = true;           // false models a single-detector tap (no rejection)
    double eta = 1.0;               // detection efficiency after the cell (optics + diode QE)
    double dark_floor_rel_sql = 0.005;  // at 6 mW; fixed absolute level, so ~1/P relative
    std::vector<DarkPeak> dark_peaks = {{60.0, 3.0}, {21.5e3, 2.0}, {147e3, 1.2}};
    double squeezer_lf_corner_hz = 100.0;
    double squeezer_hf_rolloff_hz = 5e6;
    double backaction_coeff = 3.65e-13;  // cm^3, squeezed probe only
};

struct NoiseFloor {
    std::vector<double> freqs_hz;
    std::vector<double> psd_rel_sql;   // linear, 1.0 == shot-noise limit
    // Split used to pair probe kinds over a common classical-noise
    // realization: total = quantum + common, bin by bin.
    std::vector<double> quantum_rel_sql;
    std::vector<double> common_rel_sql;
    Probe probe = Probe::coherent;
    double density_cm3 = 0.0;
    double power_w = 0.0;

    std::vector<double> psd_db() const;
};

// Absolute shot-noise PSD of the detected power, 2*h*nu*P (W^2/Hz); only
// ratios of this quantity are meaningful to the rest of the model.
double sql_psd(double power_w);

// Relative intensity PSD at frequency f (1/Hz).
double rin_spectrum(double f_hz, const NoiseConfig& cfg);

// Intensity-noise PSD relative to the shot level at the same power, in dB.
// Balanced detection subtracts cmrr_db.
double rin_psd(double power_w, double f_hz, const NoiseConfig& cfg, bool balanced);

// Squeezer output variance vs frequency (linear rel SQL): squeezing holds
// between the low-frequency corner and the MHz roll-off and relaxes to the
// shot level outside.
double squeezer_spectrum(double f_hz, const SqueezeParams& squeeze, const NoiseConfig& cfg);

// Full magnetometer noise floor over a frequency grid.
NoiseFloor magnetometer_noise_floor(const std::vector<double>& freqs_hz, double density_cm3,
                                    double power_w, Probe probe, const SqueezeParams& squeeze,
                                    const NoiseConfig& cfg, const CellParams& cell);

// Coherent-minus-squeezed floor (dB), averaged over a 2 kHz window of 100
// points centered on f_hz, for each density. Positive = squeezing helps.
std::vector<std::pair<double, double>> suppression_vs_density(
    const std::vector<double>& densities_cm3, double f_hz, double power_w,
    const SqueezeParams& squeeze, const NoiseConfig& cfg, const CellParams& cell);

}  // namespace nmor
