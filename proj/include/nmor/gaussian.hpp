#pragma once

#include <Eigen/Dense>

#include "nmor/common.hpp"

namespace nmor {

// Gaussian (covariance-matrix) description of the two-polarization-mode probe
// field. Quadrature variances are normalized so the vacuum state has variance
// 1 per quadrature — the shot-noise limit sits at exactly 0 dB.

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

// Single optical mode: quadrature means (q, p) and their 2x2 covariance.
struct ModeState {
    double mean_q = 0.0;
    double mean_p = 0.0;
    Mat2 cov = Mat2::Identity();
};

// Squeezed-vacuum parameterization. Minimum variance excess*exp(-2r) along
// the axis at theta_rad; conjugate axis carries excess*exp(+2r). excess > 1
// models an impure squeezer whose anti-squeezing overshoots the squeezing.
struct SqueezeParams {
    double r = 0.0;
    double theta_rad = 0.0;
    double excess = 1.0;

    double min_variance() const { return excess * std::exp(-2.0 * r); }
    double max_variance() const { return excess * std::exp(+2.0 * r); }
};

// Two-mode probe: x carries the classical carrier (power_w), y carries the
// quantum field of interest (vacuum or squeezed vacuum). Block layout of the
// full covariance is [x_mode, xy; xy^T, y_mode] over (q1, p1, q2, p2).
struct PolarizationState {
    ModeState x_mode;
    ModeState y_mode;
    Mat2 xy_cov = Mat2::Zero();
    double power_w = 0.0;
    double wavelength_m = 795e-9;

    Mat4 full_cov() const;
    Vec4 full_mean() const;
    void set_full_cov(const Mat4& v);
};

// Validates symmetry, positive-definiteness (eigenvalues > -1e-12, then
// clamped) and the Heisenberg bound det >= 1 - 1e-9 per mode pair.
// Throws domain_error on violation.
void check_physical(const Mat4& cov);

// x-polarized carrier of the given power; every covariance block is vacuum.
PolarizationState coherent_probe(double power_w, double wavelength_m = 795e-9);

// Squeezed vacuum mode: zero means, covariance eigenvalues
// {excess*e^{-2r}, excess*e^{+2r}}, minor axis rotated to theta_rad.
ModeState squeezed_vacuum(const SqueezeParams& params);

// Replaces the probe's y mode with the given squeezed vacuum (the x carrier
// and its power are untouched). Convenience for assembling the probe chain.
PolarizationState with_squeezed_y(const PolarizationState& probe, const SqueezeParams& params);

// Beam-splitter loss model: means scale by sqrt(eta), covariance contracts
// toward vacuum, V -> eta*V + (1-eta)*I; power scales by eta.
PolarizationState apply_loss(const PolarizationState& state, double eta);

// Phase retarder: rotates the y mode's quadrature plane by delta_rad (and the
// cross block accordingly); the x carrier is unaffected.
PolarizationState apply_phase_retarder(const PolarizationState& state, double delta_rad);

// Geometric polarization rotation by phi_rad: SO(2) mixing of the x and y
// modes applied to means and all covariance blocks.
PolarizationState apply_polarization_rotation(const PolarizationState& state, double phi_rad);

// Polarizing beam splitter: keeps one axis, replaces the other with vacuum.
enum class Axis { x, y };
PolarizationState project_pbs(const PolarizationState& state, Axis keep);

// Normalized variance of the balanced-subtraction photocurrent when the state
// is analyzed by a polarizing splitter rotated to analyzer_angle_rad.
// 1.0 == shot-noise limit. Throws domain_error at zero power (no local
// oscillator to beat against).
double analyzer_variance(const PolarizationState& state, double analyzer_angle_rad);

// Mean (DC) balanced-subtraction signal in carrier-power units: for a carrier
// along x rotated by phi, this is power*sin(2*(phi - analyzer + pi/4))-like;
// used by tests to pin the small-angle gain the variance normalization assumes.
double analyzer_mean_signal(const PolarizationState& state, double analyzer_angle_rad);

}  // namespace nmor
