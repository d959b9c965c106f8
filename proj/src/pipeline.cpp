#include "nmor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>

namespace nmor {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::map<std::string, std::string> provenance(const ExperimentConfig& cfg,
                                              const std::string& command) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "0x%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    return {{"command", command}, {"config_hash", hash}, {"seed", std::to_string(cfg.seed)}};
}

// Log-spaced evaluation grid for the analytic floor, hugging the analysis
// band: from just under the first Welch bin up to just under Nyquist.
std::vector<double> floor_grid(const ExperimentConfig& cfg) {
    const double lo = std::max(0.45 * cfg.rbw_hz, 0.02);
    const double hi = 0.499 * cfg.sample_rate_hz;
    const int n = 600;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return grid;
}

Table welch_table(const std::string& name, const SpectrumEstimate& est, double fs,
                  const std::map<std::string, std::string>& meta) {
    Table t;
    t.name = name;
    t.columns = {"freq_Hz", "psd", "psd_dB_rel_sql"};
    t.meta = meta;
    t.meta["rbw_hz"] = fmt(est.rbw_hz);
    t.meta["averages"] = std::to_string(est.n_avg);
    const double ref = series_sql_psd(fs);
    t.rows.reserve(est.freqs_hz.size());
    for (std::size_t k = 1; k < est.freqs_hz.size(); ++k)  // k = 0 is the zeroed DC bin
        t.rows.push_back({est.freqs_hz[k], est.psd[k], to_db(est.psd[k] / ref)});
    return t;
}

Table floor_table(const std::string& name, const NoiseFloor& floor,
                  const std::map<std::string, std::string>& meta) {
    Table t;
    t.name = name;
    t.columns = {"freq_Hz", "psd_dB_rel_sql"};
    t.meta = meta;
    t.rows.reserve(floor.freqs_hz.size());
    for (std::size_t i = 0; i < floor.freqs_hz.size(); ++i)
        t.rows.push_back({floor.freqs_hz[i], to_db(floor.psd_rel_sql[i])});
    return t;
}

}  // namespace

SensitivityResult sensitivity(double floor_db_rel_sql, double detected_power_w,
                              double wavelength_m, double slope_rad_per_t) {
    if (!(detected_power_w > 0.0))
        throw domain_error("sensitivity: detected power must be positive");
    if (!(slope_rad_per_t > 0.0))
        throw domain_error("sensitivity: slope must be positive (no rotation response)");
    const double flux = photon_flux(detected_power_w, wavelength_m);
    SensitivityResult r;
    r.slope_rad_per_t = slope_rad_per_t;
    r.noise_rad_per_rthz = std::pow(10.0, floor_db_rel_sql / 20.0) / (2.0 * std::sqrt(flux));
    r.delta_b_t_per_rthz = r.noise_rad_per_rthz / slope_rad_per_t;
    return r;
}

RunResult run_b_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    const double density = cfg.density();
    const ResponseCurve curve =
        response_curve(cfg.cell, density, cfg.power_w, cfg.b_min_t, cfg.b_max_t, cfg.b_points);

    RunResult out;
    out.command = "b-sweep";
    Table t;
    t.name = "response";
    t.columns = {"b_T", "phi_rad"};
    t.meta = provenance(cfg, out.command);
    t.meta["density_cm3"] = fmt(density);
    t.meta["power_mw"] = fmt(cfg.power_w * 1e3);
    t.meta["slope_rad_per_T"] = fmt(curve.slope_rad_per_t);
    for (std::size_t i = 0; i < curve.b_values_t.size(); ++i)
        t.rows.push_back({curve.b_values_t[i], curve.phi_values_rad[i]});
    out.tables.push_back(std::move(t));

    Trace tr;
    tr.label = "rotation";
    for (std::size_t i = 0; i < curve.b_values_t.size(); ++i) {
        tr.x.push_back(curve.b_values_t[i] * 1e6);
        tr.y.push_back(curve.phi_values_rad[i] * 1e3);
    }
    out.plots.push_back({"response", "Magnetometer response", "magnetic field (uT)",
                         "rotation (mrad)", false, {std::move(tr)}});
    return out;
}

RunResult run_density_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    const SqueezeParams squeeze = cfg.effective_squeeze();
    const std::size_t n = cfg.temperatures_c.size();

    std::vector<double> densities(n);
    for (std::size_t i = 0; i < n; ++i) densities[i] = vapor_density(cfg.temperatures_c[i]);
    const auto supp = suppression_vs_density(densities, cfg.detection_freq_hz, cfg.power_w,
                                             squeeze, cfg.noise, cfg.cell);

    struct Row {
        double slope, tau, floor_sq_db, floor_coh_db, db_sq, db_coh;
    };
    std::vector<Row> rows(n);
    parallel_for(n, [&](std::size_t i) {
        const double density = densities[i];
        Row& r = rows[i];
        r.slope = response_slope(cfg.cell, density, cfg.power_w);
        r.tau = transmission(density, cfg.cell);
        const std::vector<double> f = {cfg.detection_freq_hz};
        r.floor_sq_db = to_db(magnetometer_noise_floor(f, density, cfg.power_w, Probe::squeezed,
                                                       squeeze, cfg.noise, cfg.cell)
                                  .psd_rel_sql[0]);
        r.floor_coh_db = to_db(magnetometer_noise_floor(f, density, cfg.power_w, Probe::coherent,
                                                        squeeze, cfg.noise, cfg.cell)
                                   .psd_rel_sql[0]);
        const double detected_w = cfg.power_w * r.tau * cfg.noise.eta;
        r.db_sq = sensitivity(r.floor_sq_db, detected_w, cfg.wavelength_m, r.slope).delta_b_t_per_rthz;
        r.db_coh =
            sensitivity(r.floor_coh_db, detected_w, cfg.wavelength_m, r.slope).delta_b_t_per_rthz;
    });

    RunResult out;
    out.command = "density-sweep";
    Table t;
    t.name = "density_sweep";
    t.columns = {"temperature_C",          "density_cm3",
                 "slope_rad_per_T",        "transmission",
                 "floor_squeezed_dB_rel_sql", "floor_coherent_dB_rel_sql",
                 "suppression_dB",         "delta_b_squeezed_T_per_rtHz",
                 "delta_b_coherent_T_per_rtHz"};
    t.meta = provenance(cfg, out.command);
    t.meta["detection_freq_hz"] = fmt(cfg.detection_freq_hz);
    for (std::size_t i = 0; i < n; ++i)
        t.rows.push_back({cfg.temperatures_c[i], densities[i], rows[i].slope, rows[i].tau,
                          rows[i].floor_sq_db, rows[i].floor_coh_db, supp[i].second, rows[i].db_sq,
                          rows[i].db_coh});
    out.tables.push_back(std::move(t));

    Trace supp_tr{"suppression", densities, {}};
    for (const auto& [d, s] : supp) supp_tr.y.push_back(s);
    out.plots.push_back({"suppression", "Quantum-noise suppression vs density", "density (cm^-3)",
                         "suppression (dB)", true, {std::move(supp_tr)}});

    Trace db_sq{"squeezed probe", densities, {}}, db_coh{"coherent probe", densities, {}};
    for (const Row& r : rows) {
        db_sq.y.push_back(r.db_sq * 1e12);
        db_coh.y.push_back(r.db_coh * 1e12);
    }
    out.plots.push_back({"sensitivity_sweep", "Field sensitivity vs density", "density (cm^-3)",
                         "delta B (pT/rtHz)", true, {std::move(db_sq), std::move(db_coh)}});
    return out;
}

SpectrumBundle simulate_spectra(const ExperimentConfig& cfg) {
    validate(cfg);
    const double density = cfg.density();
    const SqueezeParams squeeze = cfg.effective_squeeze();
    const std::vector<double> grid = floor_grid(cfg);

    SpectrumBundle b;
    b.floor_squeezed = magnetometer_noise_floor(grid, density, cfg.power_w, Probe::squeezed,
                                                squeeze, cfg.noise, cfg.cell);
    b.floor_coherent = magnetometer_noise_floor(grid, density, cfg.power_w, Probe::coherent,
                                                squeeze, cfg.noise, cfg.cell);

    // Field modulation appears as a rotation tone; sized against the
    // shot-limited readout so it lives in the same normalized units.
    std::optional<Modulation> mod;
    if (cfg.mod_freq_hz > 0.0 && cfg.mod_b_amp_t > 0.0) {
        const double slope = response_slope(cfg.cell, density, cfg.power_w);
        const double detected_flux =
            photon_flux(cfg.power_w, cfg.wavelength_m) * transmission(density, cfg.cell) * cfg.noise.eta;
        const double dphi_sql = 1.0 / (2.0 * std::sqrt(detected_flux));
        mod = Modulation{cfg.mod_freq_hz, slope * cfg.mod_b_amp_t / dphi_sql};
    }

    // Both probes share the classical record (identical floor and seed, so
    // bit-identical samples); only the quantum record changes with the probe.
    const std::uint64_t seed_quantum = cfg.seed;
    const std::uint64_t seed_common = cfg.seed ^ 0x9e3779b97f4a7c15ull;
    auto build = [&](const NoiseFloor& floor) {
        NoiseFloor quantum = floor, common = floor;
        quantum.psd_rel_sql = floor.quantum_rel_sql;
        common.psd_rel_sql = floor.common_rel_sql;
        TimeSeries q =
            synthesize(quantum, std::nullopt, cfg.sample_rate_hz, cfg.duration_s, seed_quantum);
        const TimeSeries c = synthesize(common, mod, cfg.sample_rate_hz, cfg.duration_s, seed_common);
        for (std::size_t i = 0; i < q.samples.size(); ++i) q.samples[i] += c.samples[i];
        if (q.warning.empty()) q.warning = c.warning;
        return q;
    };
    b.series_squeezed = build(b.floor_squeezed);
    b.series_coherent = build(b.floor_coherent);
    b.est_squeezed = welch_psd(b.series_squeezed, cfg.rbw_hz, cfg.averages);
    b.est_coherent = welch_psd(b.series_coherent, cfg.rbw_hz, cfg.averages);
    return b;
}

RunResult run_spectrum(const ExperimentConfig& cfg) {
    const SpectrumBundle b = simulate_spectra(cfg);

    RunResult out;
    out.command = "spectrum";
    auto meta = provenance(cfg, out.command);
    meta["density_cm3"] = fmt(b.floor_squeezed.density_cm3);
    meta["power_mw"] = fmt(cfg.power_w * 1e3);
    if (!b.series_squeezed.warning.empty()) meta["warning"] = b.series_squeezed.warning;

    out.tables.push_back(welch_table("spectrum_squeezed", b.est_squeezed, cfg.sample_rate_hz, meta));
    out.tables.push_back(welch_table("spectrum_coherent", b.est_coherent, cfg.sample_rate_hz, meta));
    out.tables.push_back(floor_table("floor_squeezed", b.floor_squeezed, meta));
    out.tables.push_back(floor_table("floor_coherent", b.floor_coherent, meta));

    const double ref = series_sql_psd(cfg.sample_rate_hz);
    Trace sq{"squeezed probe", {}, {}}, coh{"coherent probe", {}, {}};
    for (std::size_t k = 1; k < b.est_squeezed.freqs_hz.size(); ++k) {
        sq.x.push_back(b.est_squeezed.freqs_hz[k]);
        sq.y.push_back(to_db(b.est_squeezed.psd[k] / ref));
        coh.x.push_back(b.est_coherent.freqs_hz[k]);
        coh.y.push_back(to_db(b.est_coherent.psd[k] / ref));
    }
    out.plots.push_back({"spectrum", "Polarimeter noise spectra", "frequency (Hz)",
                         "PSD (dB rel SQL)", true, {std::move(coh), std::move(sq)}});
    return out;
}

RunResult run_sensitivity(const ExperimentConfig& cfg) {
    validate(cfg);
    const double density = cfg.density();
    const SqueezeParams squeeze = cfg.effective_squeeze();
    const double slope = response_slope(cfg.cell, density, cfg.power_w);
    const double tau = transmission(density, cfg.cell);
    const double detected_w = cfg.power_w * tau * cfg.noise.eta;
    const std::vector<double> f = {cfg.detection_freq_hz};

    RunResult out;
    out.command = "sensitivity";
    Table t;
    t.name = "sensitivity";
    t.columns = {"probe_squeezed",     "density_cm3",       "slope_rad_per_T",
                 "floor_dB_rel_sql",   "noise_rad_per_rtHz", "delta_b_T_per_rtHz"};
    t.meta = provenance(cfg, out.command);
    t.meta["detection_freq_hz"] = fmt(cfg.detection_freq_hz);
    t.meta["transmission"] = fmt(tau);
    for (const Probe probe : {Probe::coherent, Probe::squeezed}) {
        const double floor_db = to_db(
            magnetometer_noise_floor(f, density, cfg.power_w, probe, squeeze, cfg.noise, cfg.cell)
                .psd_rel_sql[0]);
        SensitivityResult r = sensitivity(floor_db, detected_w, cfg.wavelength_m, slope);
        r.density_cm3 = density;
        r.probe = probe;
        t.rows.push_back({probe == Probe::squeezed ? 1.0 : 0.0, r.density_cm3, r.slope_rad_per_t,
                          floor_db, r.noise_rad_per_rthz, r.delta_b_t_per_rthz});
    }
    out.tables.push_back(std::move(t));
    return out;
}

RunResult run_command(const ExperimentConfig& cfg, const std::string& command) {
    if (command == "b-sweep") return run_b_sweep(cfg);
    if (command == "density-sweep") return run_density_sweep(cfg);
    if (command == "spectrum") return run_spectrum(cfg);
    if (command == "sensitivity") return run_sensitivity(cfg);
    throw config_error("unknown command '" + command +
                       "' (expected b-sweep, density-sweep, spectrum or sensitivity)");
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_directory.empty()) return cfg.out_directory;
    if (const char* env = std::getenv("NMOR_OUT_DIR"); env && *env) return env;
    return ".";
}

std::vector<std::string> write_outputs(const RunResult& result, const ExperimentConfig& cfg,
                                       const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error(dir + ": cannot create output directory (" + ec.message() + ")");

    const std::set<std::string> formats(cfg.formats.begin(), cfg.formats.end());
    std::vector<std::string> written;
    if (formats.count("csv")) {
        for (const Table& t : result.tables) {
            const std::string path = (fs::path(dir) / (t.name + ".csv")).string();
            write_csv(path, t);
            written.push_back(path);
        }
    }
    if (formats.count("json")) {
        std::string stem = result.command;
        std::replace(stem.begin(), stem.end(), '-', '_');
        const std::string path = (fs::path(dir) / (stem + ".json")).string();
        write_json(path, result.tables, provenance(cfg, result.command));
        written.push_back(path);
    }
    if (formats.count("svg")) {
        for (const PlotSpec& p : result.plots) {
            const std::string path = (fs::path(dir) / (p.name + ".svg")).string();
            write_svg(path, p);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace nmor
