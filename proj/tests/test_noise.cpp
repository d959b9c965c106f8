#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmor/noise.hpp"

using namespace nmor;

namespace {

const CellParams kCell;
const NoiseConfig kNoise;
const SqueezeParams kSqueeze{0.345814, 0.0, 1.26};  // -2 dB / +4 dB squeezer

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("shot-noise PSD is linear in power") {
    const double p = 6e-3;
    CHECK(sql_psd(2 * p) / sql_psd(p) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sql_psd(4 * p) / sql_psd(p) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(to_db(sql_psd(p) / sql_psd(p)) == doctest::Approx(0.0));
    CHECK(to_db(sql_psd(2 * p) / sql_psd(p)) == doctest::Approx(3.0103).epsilon(1e-4));
    CHECK_THROWS_AS(sql_psd(0.0), domain_error);
    CHECK_THROWS_AS(sql_psd(-1e-3), domain_error);
}

TEST_CASE("dB helpers round-trip exactly") {
    for (double x : {1e-6, 0.5, 1.0, 3.7, 1e8}) {
        CHECK(from_db(to_db(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("intensity noise scales 6 dB per doubling absolute, 3 dB rel SQL") {
    const double p = 3e-3, f = 7e3;
    // Relative to SQL the RIN grows 3.01 dB per doubling...
    const double step_rel = rin_psd(2 * p, f, kNoise, false) - rin_psd(p, f, kNoise, false);
    CHECK(step_rel == doctest::Approx(3.0103).epsilon(1e-4));
    // ...and the SQL reference itself grows 3.01 dB, giving 6.02 dB absolute.
    const double step_abs = step_rel + to_db(sql_psd(2 * p) / sql_psd(p));
    CHECK(step_abs == doctest::Approx(6.0206).epsilon(1e-4));

    // Balanced detection sits exactly cmrr_db below the single-detector tap.
    CHECK(rin_psd(p, f, kNoise, false) - rin_psd(p, f, kNoise, true) ==
          doctest::Approx(kNoise.cmrr_db).epsilon(1e-10));
}

TEST_CASE("rin spectrum shape: flat top, technical rise at low frequency") {
    CHECK(rin_spectrum(5e6, kNoise) == doctest::Approx(kNoise.rin_level).epsilon(1e-3));
    // Steep technical segment between corner and knee...
    CHECK(rin_spectrum(2e3, kNoise) / rin_spectrum(2e4, kNoise) > 15.0);
    // ...relaxing to a 1/f rise below the corner.
    CHECK(rin_spectrum(100.0, kNoise) / rin_spectrum(200.0, kNoise) ==
          doctest::Approx(2.0).epsilon(0.05));
    // Frozen calibration point: S_RIN(200 Hz) = 4.0e-11/Hz.
    CHECK(rin_spectrum(200.0, kNoise) == doctest::Approx(4.0e-11).epsilon(2e-3));
    CHECK_THROWS_AS(rin_spectrum(0.0, kNoise), domain_error);
}

TEST_CASE("squeezer spectrum holds -2 dB in band and relaxes at the edges") {
    SqueezeParams pure{std::log(10.0) / 10.0, 0.0, 1.0};
    CHECK(to_db(squeezer_spectrum(1e5, pure, kNoise)) == doctest::Approx(-2.0).epsilon(2e-3));
    // Squeezing washes out below the low-frequency corner.
    CHECK(squeezer_spectrum(10.0, pure, kNoise) > 0.99);
    CHECK(to_db(squeezer_spectrum(10.0, pure, kNoise)) <= 0.0 + 1e-12);
    double prev = squeezer_spectrum(5.0, pure, kNoise);
    for (double f = 10.0; f <= 2e4; f *= 2.0) {
        const double v = squeezer_spectrum(f, pure, kNoise);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    // Still close to full squeezing at the top of the analysis band.
    CHECK(to_db(squeezer_spectrum(1e6, pure, kNoise)) < -1.85);
    // Off state is exactly shot-limited everywhere.
    SqueezeParams off{0.0, 0.0, 1.0};
    for (double f : {1.0, 100.0, 1e4, 1e6}) {
        CHECK(squeezer_spectrum(f, off, kNoise) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // Impure squeezer: in-band variance is excess*e^{-2r}.
    CHECK(squeezer_spectrum(1e5, kSqueeze, kNoise) ==
          doctest::Approx(kSqueeze.min_variance()).epsilon(1e-3));
}

TEST_CASE("noise floor reduces to the bare probe at zero density") {
    NoiseConfig quiet = kNoise;
    quiet.rin_level = 0.0;
    quiet.dark_floor_rel_sql = 0.0;
    quiet.dark_peaks.clear();
    const auto grid = linspace(1e3, 1e6, 50);

    const auto coh =
        magnetometer_noise_floor(grid, 0.0, 6e-3, Probe::coherent, kSqueeze, quiet, kCell);
    for (double v : coh.psd_rel_sql) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    const auto sq =
        magnetometer_noise_floor(grid, 0.0, 6e-3, Probe::squeezed, kSqueeze, quiet, kCell);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(sq.psd_rel_sql[i] ==
              doctest::Approx(squeezer_spectrum(grid[i], kSqueeze, quiet)).epsilon(1e-12));
    }
}

TEST_CASE("coherent floor at default calibration is shot-limited at high frequency") {
    const auto grid = linspace(4e5, 1e6, 20);
    const auto fl =
        magnetometer_noise_floor(grid, 0.0, 6e-3, Probe::coherent, kSqueeze, kNoise, kCell);
    for (double v : fl.psd_rel_sql) {
        CHECK(to_db(v) < 0.15);
        CHECK(to_db(v) >= 0.0);
    }
}

TEST_CASE("squeezed floor beats coherent wherever back-action is off") {
    NoiseConfig cfg = kNoise;
    cfg.backaction_coeff = 0.0;
    const auto grid = linspace(1e3, 2e6, 200);
    for (double density : {0.0, 1.3e10, 5.4e11, 7.5e11}) {
        const auto coh =
            magnetometer_noise_floor(grid, density, 6e-3, Probe::coherent, kSqueeze, cfg, kCell);
        const auto sq =
            magnetometer_noise_floor(grid, density, 6e-3, Probe::squeezed, kSqueeze, cfg, kCell);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(sq.psd_rel_sql[i] <= coh.psd_rel_sql[i] + 1e-15);
        }
    }
}

TEST_CASE("classical terms are identical across probe kinds") {
    const auto grid = linspace(1e2, 1e6, 120);
    const auto coh =
        magnetometer_noise_floor(grid, 3.6e10, 6e-3, Probe::coherent, kSqueeze, kNoise, kCell);
    const auto sq =
        magnetometer_noise_floor(grid, 3.6e10, 6e-3, Probe::squeezed, kSqueeze, kNoise, kCell);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(coh.common_rel_sql[i] == sq.common_rel_sql[i]);  // bitwise: same code path
        CHECK(coh.psd_rel_sql[i] ==
              doctest::Approx(coh.quantum_rel_sql[i] + coh.common_rel_sql[i]).epsilon(1e-15));
    }
    // With squeezing disabled the full floors coincide bin by bin.
    SqueezeParams off{0.0, 0.0, 1.0};
    const auto coh0 =
        magnetometer_noise_floor(grid, 3.6e10, 6e-3, Probe::coherent, off, kNoise, kCell);
    const auto sq0 =
        magnetometer_noise_floor(grid, 3.6e10, 6e-3, Probe::squeezed, off, kNoise, kCell);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(coh0.psd_rel_sql[i] == sq0.psd_rel_sql[i]);
    }
}

TEST_CASE("low-frequency noise at the highest density rises >= 10 dB through the coupling") {
    // The kappa^2 conversion term alone must push 200 Hz noise an order of
    // magnitude above the shot level at the 70 C density.
    const double density = 7.52e11;
    const double eta = transmission(density, kCell);
    const double flux = eta * photon_flux(6e-3, 795e-9);
    const double kappa = rin_coupling(density, 6e-3, kCell);
    const double term = kappa * kappa * rin_spectrum(200.0, kNoise) * 4.0 * flux;
    CHECK(term >= 10.0);
    CHECK(term == doctest::Approx(12.9).epsilon(0.05));  // frozen calibration
}

TEST_CASE("dark peaks appear only near their listed frequencies") {
    const auto fl = magnetometer_noise_floor({59.0, 60.0, 61.0, 1e4, 147e3, 5e5}, 0.0, 6e-3,
                                             Probe::coherent, kSqueeze, kNoise, kCell);
    // On the 60 Hz peak the floor carries its full height.
    CHECK(fl.psd_rel_sql[1] > 3.0);
    // Away from all peaks the dark term is just the small flat floor.
    CHECK(fl.psd_rel_sql[5] < 1.1);
}

TEST_CASE("suppression crosses from helpful to harmful with density") {
    const auto rows = suppression_vs_density({1.3e10, 4e10, 5e11, 6e11, 7e11, 7.52e11}, 5e5, 6e-3,
                                             kSqueeze, kNoise, kCell);
    CHECK(rows.size() == 6);
    // Frozen calibration: +1.87 dB at 25 C-equivalent density, +1.75 at 4e10.
    CHECK(rows[0].second == doctest::Approx(1.87).epsilon(0.03));
    CHECK(rows[1].second == doctest::Approx(1.75).epsilon(0.03));
    CHECK(rows[1].second >= 1.5);
    // Sign change brackets the crossover near 5.6e11.
    CHECK(rows[2].second > 0.0);
    CHECK(rows[3].second < 0.0);
    CHECK(rows[4].second <= 0.0);
    // Monotone degradation with density.
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].second < rows[i - 1].second);
    CHECK_THROWS_AS(suppression_vs_density({}, 5e5, 6e-3, kSqueeze, kNoise, kCell), domain_error);
}

TEST_CASE("floor rejects malformed grids") {
    CHECK_THROWS_AS(
        magnetometer_noise_floor({}, 0.0, 6e-3, Probe::coherent, kSqueeze, kNoise, kCell),
        domain_error);
    CHECK_THROWS_AS(
        magnetometer_noise_floor({1e3, 1e3}, 0.0, 6e-3, Probe::coherent, kSqueeze, kNoise, kCell),
        domain_error);
    CHECK_THROWS_AS(
        magnetometer_noise_floor({1e3, 2e3}, -1.0, 6e-3, Probe::coherent, kSqueeze, kNoise, kCell),
        domain_error);
    CHECK_THROWS_AS(
        magnetometer_noise_floor({1e3, 2e3}, 0.0, 0.0, Probe::coherent, kSqueeze, kNoise, kCell),
        domain_error);
}
