#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmor/gaussian.hpp"
#include "nmor/noise.hpp"
#include "nmor/vapor.hpp"

namespace nmor {

// One experiment = one INI-style file: `key = value` lines under [section]
// headers, `#`/`;` comments. Unset keys fall back to the shipped calibration,
// so presets only carry their overrides. Keys encode their unit in the name
// (power_mw, b_min_ut, ...); the struct stores SI.

struct ExperimentConfig {
    // [probe]
    double power_w = 6e-3;
    double wavelength_m = 795e-9;

    // [squeezer]
    bool squeeze_enabled = true;
    SqueezeParams squeeze{0.345814, 0.0, 1.26};

    // [cell] temperature_c, length_mm and asym live inside CellParams.
    CellParams cell;
    // When set, bypasses the vapor-pressure curve (0 = probe without atoms).
    std::optional<double> density_cm3;

    // [noise]
    NoiseConfig noise;

    // [sweep]
    double b_min_t = -120e-6;
    double b_max_t = 120e-6;
    int b_points = 961;
    std::vector<double> temperatures_c = {25, 30, 35, 40, 45, 50, 55, 60, 65, 70};
    double detection_freq_hz = 500e3;

    // [spectrum]
    double sample_rate_hz = 2.5e6;
    double duration_s = 0.2;
    double rbw_hz = 2e3;
    int averages = 300;
    double mod_freq_hz = 0.0;  // 0 = no field-modulation tone
    double mod_b_amp_t = 0.0;

    // [output]
    std::string out_directory;  // empty -> $NMOR_OUT_DIR, else "."
    std::vector<std::string> formats = {"csv", "json"};

    // [run]
    std::uint64_t seed = 12345;

    // r = 0, excess = 1 when the squeezer is switched off.
    SqueezeParams effective_squeeze() const;
    // Density override if present, else the vapor-pressure curve.
    double density() const;
};

ExperimentConfig default_config();

// Parse `text` on top of the defaults and validate. `source` names the input
// in error messages (a path, or a tag for in-memory text).
ExperimentConfig parse_config(const std::string& text, const std::string& source);
ExperimentConfig load_config(const std::string& path);

// Set a single "section.key" to a raw text value (the C-API hook). No full
// validation; call validate() before running.
void apply_key(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);

// Every violated constraint as "[section] key: message"; empty = valid.
std::vector<std::string> validation_errors(const ExperimentConfig& cfg);
// Throws config_error with all violations joined, one per line.
void validate(const ExperimentConfig& cfg);

// Effective values of every exposed key, fixed order; equal configs produce
// equal text. The hash of this text stamps emitted artifacts.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace nmor
