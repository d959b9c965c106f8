#include "nmor/noise.hpp"

namespace nmor {

namespace {

constexpr double kWavelength = 795e-9;
constexpr double kDarkRefPower = 6e-3;  // power at which dark levels are quoted

double dark_psd(double f_hz, double power_w, const NoiseConfig& cfg) {
    // The detector's own noise is a fixed absolute level, so relative to the
    // power-proportional shot level it scales as 1/P.
    double d = cfg.dark_floor_rel_sql;
    for (const auto& peak : cfg.dark_peaks) {
        const double hwhm = std::max(5.0, peak.freq_hz / 200.0);
        const double df = f_hz - peak.freq_hz;
        d += peak.height_rel_sql * hwhm * hwhm / (df * df + hwhm * hwhm);
    }
    return d * (kDarkRefPower / power_w);
}

}  // namespace

std::vector<double> NoiseFloor::psd_db() const {
    std::vector<double> out(psd_rel_sql.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = to_db(psd_rel_sql[i]);
    return out;
}

double sql_psd(double power_w) {
    if (power_w <= 0.0) throw domain_error("sql_psd: power must be positive");
    const double photon_energy = constants::planck * constants::light_speed / kWavelength;
    return 2.0 * photon_energy * power_w;
}

double rin_spectrum(double f_hz, const NoiseConfig& cfg) {
    if (f_hz <= 0.0) throw domain_error("rin_spectrum: frequency must be positive");
    const double knee = cfg.rin_knee_hz / f_hz;
    const double corner = cfg.rin_corner_hz / f_hz;
    return cfg.rin_level * (1.0 + knee * knee * knee / (1.0 + corner * corner));
}

double rin_psd(double power_w, double f_hz, const NoiseConfig& cfg, bool balanced) {
    if (power_w <= 0.0) throw domain_error("rin_psd: power must be positive");
    // Relative-intensity noise referenced to shot noise at the same power:
    // S_RIN * Phi / 2. Grows linearly with power (the absolute PSD grows as
    // P^2 while the shot reference grows as P).
    double rel = rin_spectrum(f_hz, cfg) * photon_flux(power_w, kWavelength) / 2.0;
    if (balanced) rel *= from_db(-cfg.cmrr_db);
    return to_db(rel);
}

double squeezer_spectrum(double f_hz, const SqueezeParams& squeeze, const NoiseConfig& cfg) {
    if (f_hz <= 0.0) throw domain_error("squeezer_spectrum: frequency must be positive");
    const double lf = cfg.squeezer_lf_corner_hz;
    const double hf = cfg.squeezer_hf_rolloff_hz;
    const double band = (f_hz * f_hz / (f_hz * f_hz + lf * lf)) / (1.0 + (f_hz / hf) * (f_hz / hf));
    return 1.0 + (squeeze.min_variance() - 1.0) * band;
}

NoiseFloor magnetometer_noise_floor(const std::vector<double>& freqs_hz, double density_cm3,
                                    double power_w, Probe probe, const SqueezeParams& squeeze,
                                    const NoiseConfig& cfg, const CellParams& cell) {
    if (freqs_hz.empty()) throw domain_error("magnetometer_noise_floor: empty frequency grid");
    for (std::size_t i = 1; i < freqs_hz.size(); ++i)
        if (freqs_hz[i] <= freqs_hz[i - 1])
            throw domain_error("magnetometer_noise_floor: frequency grid must be increasing");
    if (density_cm3 < 0.0) throw domain_error("magnetometer_noise_floor: negative density");
    if (power_w <= 0.0) throw domain_error("magnetometer_noise_floor: power must be positive");
    if (cfg.eta < 0.0 || cfg.eta > 1.0)
        throw domain_error("magnetometer_noise_floor: eta must lie in [0, 1]");

    const double eta = transmission(density_cm3, cell) * cfg.eta;
    const double detected_flux = eta * photon_flux(power_w, kWavelength);
    const double kappa = rin_coupling(density_cm3, power_w, cell);
    const double cmrr = cfg.balanced ? from_db(-cfg.cmrr_db) : 1.0;
    // Back-action excess: conjectured atomic noise fed by the anti-squeezed
    // quadrature; absent for the coherent probe and at zero squeezing.
    const double backaction = (probe == Probe::squeezed)
                                  ? cfg.backaction_coeff * density_cm3 * (squeeze.max_variance() - 1.0)
                                  : 0.0;

    NoiseFloor fl;
    fl.freqs_hz = freqs_hz;
    fl.probe = probe;
    fl.density_cm3 = density_cm3;
    fl.power_w = power_w;
    fl.psd_rel_sql.resize(freqs_hz.size());
    fl.quantum_rel_sql.resize(freqs_hz.size());
    fl.common_rel_sql.resize(freqs_hz.size());

    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        const double f = freqs_hz[i];
        double quantum = 1.0;
        if (probe == Probe::squeezed) {
            // The squeezed vacuum rides through the absorbing cell: the loss
            // channel pulls its variance toward 1 exactly as apply_loss does.
            quantum = eta * squeezer_spectrum(f, squeeze, cfg) + (1.0 - eta) + backaction;
        }
        const double srin = rin_spectrum(f, cfg);
        const double rin_direct = srin * (detected_flux / 2.0) * cmrr;
        // Rotation noise from power fluctuations, in phase-noise units
        // relative to the shot-limited readout 1/(4*detected_flux).
        const double rin_coupled = kappa * kappa * srin * 4.0 * detected_flux;
        const double common = rin_direct + rin_coupled + dark_psd(f, power_w, cfg);
        fl.quantum_rel_sql[i] = quantum;
        fl.common_rel_sql[i] = common;
        fl.psd_rel_sql[i] = quantum + common;
        if (!std::isfinite(fl.psd_rel_sql[i]))
            throw domain_error("magnetometer_noise_floor: non-finite PSD");
    }
    return fl;
}

std::vector<std::pair<double, double>> suppression_vs_density(
    const std::vector<double>& densities_cm3, double f_hz, double power_w,
    const SqueezeParams& squeeze, const NoiseConfig& cfg, const CellParams& cell) {
    if (densities_cm3.empty()) throw domain_error("suppression_vs_density: empty density list");

    // 100-point, 2 kHz analysis window centered on the detection frequency.
    std::vector<double> window(100);
    for (int i = 0; i < 100; ++i) window[i] = f_hz - 1e3 + 2e3 * i / 99.0;

    std::vector<std::pair<double, double>> out(densities_cm3.size());
    parallel_for(densities_cm3.size(), [&](std::size_t i) {
        const double n = densities_cm3[i];
        const auto coh =
            magnetometer_noise_floor(window, n, power_w, Probe::coherent, squeeze, cfg, cell);
        const auto sq =
            magnetometer_noise_floor(window, n, power_w, Probe::squeezed, squeeze, cfg, cell);
        kahan_sum acc;
        for (std::size_t k = 0; k < window.size(); ++k)
            acc.add(to_db(coh.psd_rel_sql[k]) - to_db(sq.psd_rel_sql[k]));
        out[i] = {n, acc.value() / double(window.size())};
    });
    return out;
}

}  // namespace nmor
