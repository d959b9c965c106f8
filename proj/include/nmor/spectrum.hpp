#pragma once

#include <optional>
#include <string>

#include "nmor/noise.hpp"

namespace nmor {

// Simulated detector record and lab-grade PSD estimation. Series are stored
// in SQL-normalized units: a shot-limited record has unit variance, so its
// one-sided PSD is flat at 2/fs and 0 dB rel SQL == 2/fs units^2/Hz.

struct TimeSeries {
    std::vector<double> samples;
    double fs_hz = 0.0;
    double duration_s = 0.0;
    std::uint64_t seed = 0;
    std::string warning;  // nonempty when the record is short for the requested analysis
};

struct SpectrumEstimate {
    std::vector<double> freqs_hz;
    std::vector<double> psd;  // one-sided, units^2/Hz
    double rbw_hz = 0.0;      // effective noise bandwidth actually achieved
    int n_avg = 0;
};

struct Modulation {
    double freq_hz = 0.0;
    double amplitude = 0.0;  // series units (SQL-normalized)
};

// One-sided PSD of a unit-variance (shot-limited) series: the 0 dB reference.
inline double series_sql_psd(double fs_hz) { return 2.0 / fs_hz; }

// Gaussian record with the floor's spectral shape (frequency-domain coloring)
// plus an optional sinusoidal field-modulation tone. Deterministic per seed.
// Throws domain_error if fs cannot carry the floor's top frequency; flags a
// warning when the duration gives <10 periods of the lowest floor frequency.
TimeSeries synthesize(const NoiseFloor& floor, const std::optional<Modulation>& modulation,
                      double fs_hz, double duration_s, std::uint64_t seed);

// Shortest record welch_psd accepts for this sample-rate / rbw / average
// combination (50% overlap accounting included).
double welch_min_duration_s(double fs_hz, double rbw_hz, int n_avg);

// Welch estimate: Hann window, 50% overlap, segment length chosen so the
// effective noise bandwidth matches rbw_hz (within 5%), compensated
// accumulation over the first n_avg segments.
SpectrumEstimate welch_psd(const TimeSeries& series, double rbw_hz, int n_avg);

// Median PSD across [band_lo, band_hi], in dB relative to the shot level of
// a unit-variance series. The median makes the estimate robust to narrow
// spikes inside the band.
double measure_floor(const TimeSeries& series, double rbw_hz, int n_avg, double band_lo_hz,
                     double band_hi_hz);

// Same statistic on an existing estimate (fs needed for the SQL reference).
double band_median_db(const SpectrumEstimate& est, double fs_hz, double band_lo_hz,
                      double band_hi_hz);

}  // namespace nmor
