#include "nmor/gaussian.hpp"

#include <Eigen/Eigenvalues>

namespace nmor {

namespace {

Mat2 rot2(double a) {
    Mat2 r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

// Carrier power in watts implied by the quadrature means (q = 2*Re(alpha),
// p = 2*Im(alpha), photon flux = |alpha_x|^2 + |alpha_y|^2).
double carrier_power(const Vec4& mean, double wavelength_m) {
    const double flux = mean.squaredNorm() / 4.0;
    return flux * constants::planck * constants::light_speed / wavelength_m;
}

void check_mode(const Mat2& cov) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw domain_error("mode covariance not symmetric");
    if (cov.determinant() < 1.0 - 1e-9)
        throw domain_error("mode covariance violates the uncertainty bound (det < 1)");
}

}  // namespace

Mat4 PolarizationState::full_cov() const {
    Mat4 v;
    v.block<2, 2>(0, 0) = x_mode.cov;
    v.block<2, 2>(0, 2) = xy_cov;
    v.block<2, 2>(2, 0) = xy_cov.transpose();
    v.block<2, 2>(2, 2) = y_mode.cov;
    return v;
}

Vec4 PolarizationState::full_mean() const {
    return Vec4(x_mode.mean_q, x_mode.mean_p, y_mode.mean_q, y_mode.mean_p);
}

void PolarizationState::set_full_cov(const Mat4& v) {
    x_mode.cov = v.block<2, 2>(0, 0);
    xy_cov = v.block<2, 2>(0, 2);
    y_mode.cov = v.block<2, 2>(2, 2);
}

void check_physical(const Mat4& cov) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw domain_error("covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat4> es(cov);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw domain_error("covariance not positive semi-definite");
}

PolarizationState coherent_probe(double power_w, double wavelength_m) {
    if (power_w < 0.0) throw domain_error("coherent_probe: negative power");
    if (wavelength_m <= 0.0) throw domain_error("coherent_probe: nonpositive wavelength");
    PolarizationState s;
    s.wavelength_m = wavelength_m;
    s.power_w = power_w;
    s.x_mode.mean_q = 2.0 * std::sqrt(photon_flux(power_w, wavelength_m));
    return s;
}

ModeState squeezed_vacuum(const SqueezeParams& params) {
    if (params.r < 0.0) throw domain_error("squeezed_vacuum: r must be >= 0");
    if (params.excess < 1.0) throw domain_error("squeezed_vacuum: excess must be >= 1");
    ModeState m;
    const Mat2 r = rot2(params.theta_rad);
    m.cov = r * Eigen::DiagonalMatrix<double, 2>(params.min_variance(), params.max_variance()) *
            r.transpose();
    check_mode(m.cov);
    return m;
}

PolarizationState with_squeezed_y(const PolarizationState& probe, const SqueezeParams& params) {
    PolarizationState s = probe;
    s.y_mode = squeezed_vacuum(params);
    s.xy_cov.setZero();
    check_physical(s.full_cov());
    return s;
}

PolarizationState apply_loss(const PolarizationState& state, double eta) {
    if (eta < 0.0 || eta > 1.0) throw domain_error("apply_loss: eta outside [0, 1]");
    PolarizationState s = state;
    const double root = std::sqrt(eta);
    s.x_mode.mean_q *= root;
    s.x_mode.mean_p *= root;
    s.y_mode.mean_q *= root;
    s.y_mode.mean_p *= root;
    s.set_full_cov(eta * state.full_cov() + (1.0 - eta) * Mat4::Identity());
    s.power_w = state.power_w * eta;
    return s;
}

PolarizationState apply_phase_retarder(const PolarizationState& state, double delta_rad) {
    PolarizationState s = state;
    const Mat2 r = rot2(delta_rad);
    const Vec2 mean = r * Vec2(state.y_mode.mean_q, state.y_mode.mean_p);
    s.y_mode.mean_q = mean.x();
    s.y_mode.mean_p = mean.y();
    s.y_mode.cov = r * state.y_mode.cov * r.transpose();
    s.xy_cov = state.xy_cov * r.transpose();
    return s;
}

PolarizationState apply_polarization_rotation(const PolarizationState& state, double phi_rad) {
    const double c = std::cos(phi_rad), sn = std::sin(phi_rad);
    Mat4 g = Mat4::Zero();
    // Same SO(2) mix on the q pair and the p pair; +phi tilts x toward +y.
    g(0, 0) = c; g(0, 2) = -sn;
    g(1, 1) = c; g(1, 3) = -sn;
    g(2, 0) = sn; g(2, 2) = c;
    g(3, 1) = sn; g(3, 3) = c;
    PolarizationState s = state;
    const Vec4 mean = g * state.full_mean();
    s.x_mode.mean_q = mean(0);
    s.x_mode.mean_p = mean(1);
    s.y_mode.mean_q = mean(2);
    s.y_mode.mean_p = mean(3);
    s.set_full_cov(g * state.full_cov() * g.transpose());
    return s;  // total carrier power is invariant under the rotation
}

PolarizationState project_pbs(const PolarizationState& state, Axis keep) {
    PolarizationState s = state;
    ModeState& discard = (keep == Axis::x) ? s.y_mode : s.x_mode;
    discard = ModeState{};  // vacuum: zero mean, identity covariance
    s.xy_cov.setZero();
    s.power_w = carrier_power(s.full_mean(), s.wavelength_m);
    return s;
}

namespace {

// Measurement vector of the linearized balanced-subtraction operator in the
// frame where the analyzer sits at 45 deg: dS = (qbar1 q2 + pbar1 p2 +
// qbar2 q1 + pbar2 p1)/2. Its vacuum variance w^T w equals the photon flux.
Vec4 subtraction_vector(const PolarizationState& s) {
    const Vec4 m = s.full_mean();
    return 0.5 * Vec4(m(2), m(3), m(0), m(1));
}

}  // namespace

double analyzer_variance(const PolarizationState& state, double analyzer_angle_rad) {
    if (state.power_w <= 0.0)
        throw domain_error("analyzer_variance: zero carrier power (no local oscillator)");
    // Rotate the basis so the analyzer axes sit at +-45 deg to the carrier frame.
    const PolarizationState s =
        apply_polarization_rotation(state, constants::pi / 4.0 - analyzer_angle_rad);
    const Vec4 w = subtraction_vector(s);
    const double norm = w.squaredNorm();
    return w.dot(s.full_cov() * w) / norm;
}

double analyzer_mean_signal(const PolarizationState& state, double analyzer_angle_rad) {
    const Vec4 m = state.full_mean();
    // Complex mode amplitudes alpha = (q + i p)/2, in sqrt(photon-flux) units.
    const double re1 = m(0) / 2.0, im1 = m(1) / 2.0;
    const double re2 = m(2) / 2.0, im2 = m(3) / 2.0;
    const double s1 = (re1 * re1 + im1 * im1) - (re2 * re2 + im2 * im2);
    const double s2 = 2.0 * (re1 * re2 + im1 * im2);
    const double flux_diff =
        std::cos(2.0 * analyzer_angle_rad) * s1 + std::sin(2.0 * analyzer_angle_rad) * s2;
    return flux_diff * constants::planck * constants::light_speed / state.wavelength_m;
}

}  // namespace nmor
