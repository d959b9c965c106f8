#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "nmor/vapor.hpp"

using namespace nmor;

namespace {
const CellParams kCell;  // shipped defaults
}

TEST_CASE("vapor density hits the measured ladder within 15%") {
    const struct {
        double temp_c, density;
    } points[] = {
        {25.0, 1.3e10}, {35.0, 3.6e10}, {50.0, 1.5e11}, {55.0, 2.2e11},
        {60.0, 3.4e11}, {66.0, 5.4e11}, {70.0, 7.4e11},
    };
    for (const auto& pt : points) {
        const double n = vapor_density(pt.temp_c);
        INFO("T=", pt.temp_c, " model=", n, " expected=", pt.density);
        CHECK(std::abs(n / pt.density - 1.0) < 0.15);
    }
}

TEST_CASE("vapor density is smooth and strictly increasing") {
    double prev = vapor_density(-20.0);
    double prev_step = 0.0;
    for (double t = -19.5; t <= 200.0; t += 0.5) {
        const double n = vapor_density(t);
        CHECK(n > prev);
        const double step = n / prev;
        if (prev_step > 0.0) CHECK(std::abs(step / prev_step - 1.0) < 0.01);  // no kinks
        prev_step = step;
        prev = n;
    }
    CHECK_THROWS_AS(vapor_density(-21.0), domain_error);
    CHECK_THROWS_AS(vapor_density(200.5), domain_error);
}

TEST_CASE("transmission follows Beer-Lambert") {
    CHECK(transmission(0.0, kCell) == doctest::Approx(1.0).epsilon(1e-15));

    // Analytic identity: density 1/(sigma*L) attenuates to exactly 1/e.
    const double l_cm = kCell.length_m * 100.0;
    const double n_star = 1.0 / (kCell.sigma_cm2 * l_cm);
    CHECK(transmission(n_star, kCell) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    // Calibration anchor: 6/7 of the light survives the 5.4e11 cell.
    CHECK(transmission(5.4e11, kCell) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));

    double prev = 1.0;
    for (double n = 1e10; n < 1e13; n *= 1.5) {
        const double t = transmission(n, kCell);
        CHECK(t < prev);
        CHECK(t > 0.0);
        prev = t;
    }
    CHECK_THROWS_AS(transmission(-1.0, kCell), domain_error);
}

TEST_CASE("rotation is an odd function of the field when asym = 0") {
    CellParams cell = kCell;
    cell.asym = 0.0;
    const double n = vapor_density(40.0);
    CHECK(nmor_rotation(0.0, cell, n, 6e-3) == doctest::Approx(0.0).epsilon(1e-15));
    for (double b = 1e-7; b < 2e-4; b *= 2.3) {
        const double sum = nmor_rotation(b, cell, n, 6e-3) + nmor_rotation(-b, cell, n, 6e-3);
        CHECK(std::abs(sum) < 1e-12);
    }
}

TEST_CASE("broad dispersive maximum sits at the broad width") {
    CellParams cell = kCell;
    cell.asym = 0.0;
    const double n = vapor_density(40.0);
    // Below threshold only the broad term survives: peak value A_b/2 * scale.
    const double scale = (n * transmission(n, cell)) /
                         (cell.amp_ref_density_cm3 * transmission(cell.amp_ref_density_cm3, cell));
    const double peak = nmor_rotation(cell.broad_width_t, cell, n, 0.5e-3);
    CHECK(peak == doctest::Approx(scale * cell.broad_amp_rad / 2.0).epsilon(1e-3));
    // And it is the maximum over the broad flank.
    for (double b : {20e-6, 35e-6, 65e-6, 90e-6}) {
        CHECK(nmor_rotation(b, cell, n, 0.5e-3) < peak * (1.0 + 1e-9));
    }
}

TEST_CASE("narrow resonance collapses below the power threshold") {
    const double n = vapor_density(40.0);
    // Isolate the narrow part by differencing against the gated-off curve.
    const double b = kCell.narrow_width_t;
    auto narrow_part = [&](double p) {
        CellParams broad_only = kCell;
        broad_only.narrow_amp_rad = 0.0;
        return nmor_rotation(b, kCell, n, p) - nmor_rotation(b, broad_only, n, p);
    };
    const double full = narrow_part(6e-3);
    CHECK(std::abs(narrow_part(0.5e-3) / full) < 1e-3);

    // Gate invariant: below half the threshold the narrow term is under 1%
    // of the broad term at one narrow width.
    CellParams broad_only = kCell;
    broad_only.narrow_amp_rad = 0.0;
    const double broad = nmor_rotation(b, broad_only, n, 0.7e-3);
    CHECK(std::abs(narrow_part(0.7e-3)) < 0.01 * std::abs(broad));

    // At the 6 mW reference power the gate normalizes to 1.
    CHECK(narrow_gate(6e-3, kCell) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(narrow_gate(0.5e-3, kCell) < 1e-4);
}

TEST_CASE("response slope peaks at the absorption-optimal density") {
    CHECK(response_slope(kCell, 0.0, 6e-3) == 0.0);

    // Oracle: slope(N) ~ N*exp(-sigma*N*L) whose maximum is N* = 1/(sigma*L).
    const double n_star = 1.0 / (kCell.sigma_cm2 * kCell.length_m * 100.0);
    std::vector<double> grid;
    for (double n = 0.2 * n_star; n <= 5.0 * n_star; n *= 1.07) grid.push_back(n);
    std::vector<double> slopes;
    for (double n : grid) slopes.push_back(response_slope(kCell, n, 6e-3));

    const auto it = std::max_element(slopes.begin(), slopes.end());
    const std::size_t imax = std::size_t(it - slopes.begin());
    CHECK(imax > 0);
    CHECK(imax < grid.size() - 1);
    CHECK(grid[imax - 1] <= n_star);
    CHECK(grid[imax + 1] >= n_star);

    // Rises before the peak, falls after (non-monotonic overall).
    for (std::size_t i = 1; i <= imax; ++i) CHECK(slopes[i] > slopes[i - 1]);
    for (std::size_t i = imax + 1; i < slopes.size(); ++i) CHECK(slopes[i] < slopes[i - 1]);
}

TEST_CASE("slope magnitude matches the analytic value at zero field") {
    CellParams cell = kCell;
    cell.asym = 0.0;
    const double n = vapor_density(40.0);
    const double scale = (n * transmission(n, cell)) /
                         (cell.amp_ref_density_cm3 * transmission(cell.amp_ref_density_cm3, cell));
    const double analytic = scale * (cell.broad_amp_rad / cell.broad_width_t +
                                     cell.narrow_amp_rad * narrow_gate(6e-3, cell) /
                                         cell.narrow_width_t);
    CHECK(response_slope(cell, n, 6e-3) == doctest::Approx(analytic).epsilon(2e-2));
    CHECK(response_slope(cell, n, 6e-3) > 0.0);
}

TEST_CASE("rin coupling against the closed-form power derivative") {
    CHECK(rin_coupling(0.0, 6e-3, kCell) == 0.0);

    // Independent oracle: differentiate the narrow term's power dependence
    // analytically. kappa = phi_narrow(B_op) * [P(1-g_l)/w + P_brd/(P+P_brd)].
    auto analytic_kappa = [&](double density, double p) {
        const CellParams& c = kCell;
        const double scale =
            (density * transmission(density, c)) /
            (c.amp_ref_density_cm3 * transmission(c.amp_ref_density_cm3, c));
        const double u = -0.5;
        const double phi_n = scale * c.narrow_amp_rad * narrow_gate(p, c) *
                             (u / (1.0 + u * u)) * (1.0 + c.asym * u);
        const double g_l = 1.0 / (1.0 + std::exp(-(p - c.narrow_sat_power_w) / c.narrow_sat_width_w));
        return phi_n * (p * (1.0 - g_l) / c.narrow_sat_width_w +
                        c.narrow_broadening_w / (p + c.narrow_broadening_w));
    };
    for (double density : {4e10, 1.5e11, 7.4e11}) {
        const double k = rin_coupling(density, 6e-3, kCell);
        INFO("density=", density);
        CHECK(k == doctest::Approx(analytic_kappa(density, 6e-3)).epsilon(1e-4));
    }

    // Frozen calibration point: |kappa| ~ 2.0e-3 rad at the 70 C density.
    CHECK(std::abs(rin_coupling(7.52e11, 6e-3, kCell)) ==
          doctest::Approx(2.04e-3).epsilon(0.02));

    // Magnitude strictly increasing in density up to N*.
    const double n_star = 1.0 / (kCell.sigma_cm2 * kCell.length_m * 100.0);
    double prev = 0.0;
    for (double density = 1e10; density <= n_star; density *= 1.3) {
        const double mag = std::abs(rin_coupling(density, 6e-3, kCell));
        CHECK(mag > prev);
        prev = mag;
    }
}

TEST_CASE("response curve sampling") {
    const double n = vapor_density(40.0);
    auto rc = response_curve(kCell, n, 6e-3, -150e-6, 150e-6, 601);
    CHECK(rc.b_values_t.size() == 601);
    CHECK(rc.b_values_t.front() == doctest::Approx(-150e-6));
    CHECK(rc.b_values_t.back() == doctest::Approx(150e-6));
    CHECK(rc.phi_values_rad[300] == doctest::Approx(0.0).epsilon(1e-15));  // B = 0
    CHECK(rc.slope_rad_per_t > 0.0);
    CHECK(rc.slope_rad_per_t == doctest::Approx(response_slope(kCell, n, 6e-3)));
    CHECK_THROWS_AS(response_curve(kCell, n, 6e-3, 1e-6, -1e-6, 100), domain_error);
    CHECK_THROWS_AS(response_curve(kCell, n, 6e-3, -1e-6, 1e-6, 1), domain_error);
}
