#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmor {

// Error taxonomy mirrored by the C API / CLI exit codes: config errors are
// recoverable user mistakes (exit 2), runtime errors are physics/numerics
// failures discovered mid-run (exit 3).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem trouble while reading or writing artifacts (exit 3 / NMOR_EIO).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace constants {
inline constexpr double planck      = 6.62607015e-34;  // J s
inline constexpr double light_speed = 299792458.0;     // m/s
inline constexpr double pi          = 3.14159265358979323846;
}  // namespace constants

// Photons per second carried by `power_w` of light at `wavelength_m`.
inline double photon_flux(double power_w, double wavelength_m) {
    return power_w * wavelength_m / (constants::planck * constants::light_speed);
}

// All internal arithmetic stays in linear power units; dB only at boundaries.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Compensated (Kahan) accumulator so reduction results do not depend on
// accumulation order beyond ~1e-16 relative.
class kahan_sum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(const std::vector<double>& v) {
    kahan_sum s;
    for (double x : v) s.add(x);
    return s.value();
}

// FNV-1a, used to fingerprint configs in JSON provenance blocks.
inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Runs fn(i) for i in [0, n) on a small worker pool; results must be written
// to index-addressed storage so output order is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nmor
