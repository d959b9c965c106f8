#pragma once

#include <string>
#include <vector>

#include "nmor/config.hpp"
#include "nmor/io.hpp"
#include "nmor/spectrum.hpp"

namespace nmor {

// Experiment runners. Each composes the chain (squeezer -> cell -> analyzer
// -> spectrum estimation) into one sweep and returns result tables plus
// ready-to-render plots. Time-domain work is deterministic per config seed.

struct SensitivityResult {
    double density_cm3 = 0.0;
    Probe probe = Probe::coherent;
    double noise_rad_per_rthz = 0.0;  // rotation-noise amplitude density
    double slope_rad_per_t = 0.0;
    double delta_b_t_per_rthz = 0.0;  // noise / slope, exactly
};

struct RunResult {
    std::string command;
    std::vector<Table> tables;
    std::vector<PlotSpec> plots;
};

// Smallest resolvable rotation over a floor `floor_db_rel_sql` above the
// shot-limited readout of `detected_power_w`:
//   delta_phi = 10^(dB/20) / (2 sqrt(flux)),  delta_B = delta_phi / slope.
SensitivityResult sensitivity(double floor_db_rel_sql, double detected_power_w,
                              double wavelength_m, double slope_rad_per_t);

RunResult run_b_sweep(const ExperimentConfig& cfg);
RunResult run_density_sweep(const ExperimentConfig& cfg);
RunResult run_spectrum(const ExperimentConfig& cfg);
RunResult run_sensitivity(const ExperimentConfig& cfg);
// Dispatch by CLI spelling: b-sweep | density-sweep | spectrum | sensitivity.
RunResult run_command(const ExperimentConfig& cfg, const std::string& command);

// The analytic floors and paired records behind run_spectrum. Both probe
// kinds share the classical-noise realization (and its seed), so their
// difference isolates the quantum term; exposed for cross-checks.
struct SpectrumBundle {
    NoiseFloor floor_squeezed, floor_coherent;
    TimeSeries series_squeezed, series_coherent;
    SpectrumEstimate est_squeezed, est_coherent;
};
SpectrumBundle simulate_spectra(const ExperimentConfig& cfg);

// cfg.out_directory, else $NMOR_OUT_DIR, else ".".
std::string resolve_out_dir(const ExperimentConfig& cfg);

// Emit every table/plot in the formats the config asks for; returns the
// paths written. Creates `dir` if needed.
std::vector<std::string> write_outputs(const RunResult& result, const ExperimentConfig& cfg,
                                       const std::string& dir);

}  // namespace nmor
