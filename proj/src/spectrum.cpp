#include "nmor/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <random>

namespace nmor {

namespace {

// Log-log interpolation of the floor onto an arbitrary frequency, clamped to
// the grid's end values. Floors are strictly positive, spanning decades, so
// interpolating in log space keeps power-law segments exact.
double interp_floor(const NoiseFloor& floor, double f) {
    const auto& fs = floor.freqs_hz;
    const auto& ps = floor.psd_rel_sql;
    if (f <= fs.front()) return ps.front();
    if (f >= fs.back()) return ps.back();
    const auto it = std::upper_bound(fs.begin(), fs.end(), f);
    const std::size_t hi = std::size_t(it - fs.begin());
    const std::size_t lo = hi - 1;
    const double t = (std::log(f) - std::log(fs[lo])) / (std::log(fs[hi]) - std::log(fs[lo]));
    return std::exp(std::log(ps[lo]) + t * (std::log(ps[hi]) - std::log(ps[lo])));
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

}  // namespace

TimeSeries synthesize(const NoiseFloor& floor, const std::optional<Modulation>& modulation,
                      double fs_hz, double duration_s, std::uint64_t seed) {
    if (fs_hz <= 0.0 || duration_s <= 0.0)
        throw domain_error("synthesize: fs and duration must be positive");
    if (fs_hz <= 2.0 * floor.freqs_hz.back())
        throw domain_error("synthesize: sample rate under twice the floor's top frequency");

    TimeSeries ts;
    ts.fs_hz = fs_hz;
    ts.duration_s = duration_s;
    ts.seed = seed;
    if (duration_s < 10.0 / floor.freqs_hz.front()) {
        ts.warning = "record shorter than 10 periods of the lowest analysis frequency";
    }

    const std::size_t n = std::size_t(std::llround(fs_hz * duration_s));
    const std::size_t nbins = n / 2 + 1;
    std::vector<double> spec(2 * nbins, 0.0);  // interleaved re/im

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sql = series_sql_psd(fs_hz);
    // Bin k gets E|X_k|^2 = n*fs*S(f_k)/2 so the inverse transform carries
    // one-sided PSD S(f); DC stays zero (zero-mean record).
    for (std::size_t k = 1; k < nbins; ++k) {
        const double f = double(k) * fs_hz / double(n);
        const double s = interp_floor(floor, f) * sql;
        const bool nyquist = (n % 2 == 0) && (k == n / 2);
        if (nyquist) {
            spec[2 * k] = std::sqrt(double(n) * fs_hz * s) * normal(rng);
        } else {
            const double amp = std::sqrt(double(n) * fs_hz * s / 4.0);
            spec[2 * k] = amp * normal(rng);
            spec[2 * k + 1] = amp * normal(rng);
        }
    }

    ts.samples.resize(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(int(n), reinterpret_cast<fftw_complex*>(spec.data()),
                                          ts.samples.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double inv_n = 1.0 / double(n);
    for (double& x : ts.samples) x *= inv_n;

    if (modulation && modulation->amplitude != 0.0) {
        const double w = 2.0 * constants::pi * modulation->freq_hz / fs_hz;
        for (std::size_t i = 0; i < n; ++i)
            ts.samples[i] += modulation->amplitude * std::sin(w * double(i));
    }
    return ts;
}

namespace {

// Hann's effective noise bandwidth is 1.5*fs/L; choose L to match rbw.
std::size_t hann_segment_length(double fs, double rbw_hz) {
    std::size_t len = std::size_t(std::llround(1.5 * fs / rbw_hz));
    len += len % 2;
    return len;
}

}  // namespace

double welch_min_duration_s(double fs_hz, double rbw_hz, int n_avg) {
    if (fs_hz <= 0.0) throw domain_error("welch_min_duration_s: sample rate must be positive");
    if (rbw_hz <= 0.0) throw domain_error("welch_min_duration_s: rbw must be positive");
    if (n_avg < 1) throw domain_error("welch_min_duration_s: need at least one segment");
    const std::size_t len = hann_segment_length(fs_hz, rbw_hz);
    return double(len + (len / 2) * std::size_t(n_avg - 1)) / fs_hz;
}

SpectrumEstimate welch_psd(const TimeSeries& series, double rbw_hz, int n_avg) {
    if (rbw_hz <= 0.0) throw domain_error("welch_psd: rbw must be positive");
    if (n_avg < 1) throw domain_error("welch_psd: need at least one segment");
    const double fs = series.fs_hz;
    const std::size_t len = hann_segment_length(fs, rbw_hz);
    if (len < 16) throw domain_error("welch_psd: rbw too wide for this sample rate");

    const std::size_t hop = len / 2;
    const std::size_t needed = len + hop * std::size_t(n_avg - 1);
    if (series.samples.size() < needed) {
        throw domain_error("welch_psd: record too short; need at least " +
                           std::to_string(needed / fs) + " s at this rbw and average count");
    }

    std::vector<double> window(len);
    double wsum_sq = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * constants::pi * double(i) / double(len)));
        wsum_sq += window[i] * window[i];
    }

    const std::size_t nbins = len / 2 + 1;
    std::vector<double> in(len);
    std::vector<double> out(2 * nbins);
    fftw_plan plan = fftw_plan_dft_r2c_1d(int(len), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);

    // Compensated per-bin accumulation: the result is independent of segment
    // order to ~1e-16 relative.
    std::vector<kahan_sum> acc(nbins);
    for (int seg = 0; seg < n_avg; ++seg) {
        const double* src = series.samples.data() + std::size_t(seg) * hop;
        for (std::size_t i = 0; i < len; ++i) in[i] = src[i] * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < nbins; ++k) {
            const double re = out[2 * k], im = out[2 * k + 1];
            acc[k].add(re * re + im * im);
        }
    }
    fftw_destroy_plan(plan);

    SpectrumEstimate est;
    est.rbw_hz = 1.5 * fs / double(len);
    est.n_avg = n_avg;
    est.freqs_hz.resize(nbins);
    est.psd.resize(nbins);
    const double scale = 2.0 / (fs * wsum_sq * double(n_avg));
    for (std::size_t k = 0; k < nbins; ++k) {
        est.freqs_hz[k] = double(k) * fs / double(len);
        const bool edge = (k == 0) || (k == nbins - 1 && len % 2 == 0);
        est.psd[k] = acc[k].value() * (edge ? scale / 2.0 : scale);
    }
    return est;
}

double band_median_db(const SpectrumEstimate& est, double fs_hz, double band_lo_hz,
                      double band_hi_hz) {
    std::vector<double> picked;
    for (std::size_t k = 0; k < est.freqs_hz.size(); ++k) {
        if (est.freqs_hz[k] >= band_lo_hz && est.freqs_hz[k] <= band_hi_hz)
            picked.push_back(est.psd[k]);
    }
    if (picked.empty()) throw domain_error("band_median_db: no bins inside the band");
    return to_db(median(std::move(picked)) / series_sql_psd(fs_hz));
}

double measure_floor(const TimeSeries& series, double rbw_hz, int n_avg, double band_lo_hz,
                     double band_hi_hz) {
    if (band_hi_hz <= band_lo_hz) throw domain_error("measure_floor: empty band");
    if (band_hi_hz > series.fs_hz / 2.0)
        throw domain_error("measure_floor: band extends past Nyquist");
    const SpectrumEstimate est = welch_psd(series, rbw_hz, n_avg);
    return band_median_db(est, series.fs_hz, band_lo_hz, band_hi_hz);
}

}  // namespace nmor
