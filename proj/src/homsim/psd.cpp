#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "homsim/analysis.hpp"

namespace homsim {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

/// RAII wrapper around an FFTW real-to-complex plan of fixed length.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_,
                                     FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* in() { return in_; }
    const fftw_complex* execute() {
        fftw_execute(plan_);
        return out_;
    }
    std::size_t n_out() const { return n_ / 2 + 1; }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

} // namespace

Spectrum welch_psd(const std::vector<double>& series, double dt,
                   std::size_t segment_samples, std::size_t min_segments) {
    if (!(dt > 0.0)) throw ConfigError("welch_psd: dt must be > 0");
    const std::size_t n = series.size();
    std::size_t seg = segment_samples;
    if (seg == 0) {
        // largest power of two allowing at least min_segments averages at
        // 50% overlap: n_segments = (n - seg)/(seg/2) + 1 >= min_segments
        const std::size_t limit = 2 * n / (min_segments + 1);
        seg = 16;
        while (seg * 2 <= limit) seg *= 2;
    }
    if (seg < 16 || seg > n)
        throw SimError("welch_psd: span too short for the requested resolution");

    const std::size_t hop = seg / 2; // 50% overlap
    const std::size_t n_segments = (n - seg) / hop + 1;

    std::vector<double> window(seg);
    double wsum2 = 0.0;
    for (std::size_t j = 0; j < seg; ++j) {
        window[j] =
            0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(j) /
                                  static_cast<double>(seg)));
        wsum2 += window[j] * window[j];
    }

    RealFft fft(seg);
    Spectrum spec;
    spec.psd.assign(fft.n_out(), 0.0);
    const double fs = 1.0 / dt;
    spec.df = fs / static_cast<double>(seg);
    // Hann equivalent noise bandwidth
    double wsum = 0.0;
    for (double w : window) wsum += w;
    spec.resolution_bw = spec.df * static_cast<double>(seg) * wsum2 / (wsum * wsum);

    for (std::size_t s = 0; s < n_segments; ++s) {
        const double* x = series.data() + s * hop;
        double mean = 0.0;
        for (std::size_t j = 0; j < seg; ++j) mean += x[j];
        mean /= static_cast<double>(seg);
        double* in = fft.in();
        for (std::size_t j = 0; j < seg; ++j) in[j] = (x[j] - mean) * window[j];
        const fftw_complex* out = fft.execute();
        for (std::size_t m = 0; m < spec.psd.size(); ++m)
            spec.psd[m] += out[m][0] * out[m][0] + out[m][1] * out[m][1];
    }

    // one-sided PSD normalization (interior bins doubled)
    const double scale = 1.0 / (fs * wsum2 * static_cast<double>(n_segments));
    for (std::size_t m = 0; m < spec.psd.size(); ++m) {
        double v = spec.psd[m] * scale;
        if (m != 0 && !(seg % 2 == 0 && m == spec.psd.size() - 1)) v *= 2.0;
        spec.psd[m] = v;
    }
    return spec;
}

Spectrum beat_psd(const FieldTrajectory& a, const FieldTrajectory& b,
                  std::size_t segment_samples, std::size_t min_segments) {
    if (!a.grid.same_as(b.grid)) throw SimError("beat_psd: grid mismatch");
    const auto start =
        static_cast<std::size_t>(std::max(a.valid_from, b.valid_from));
    if (start + 32 >= a.samples.size())
        throw SimError("beat_psd: overlap region too short");
    std::vector<double> current(a.samples.size() - start);
    for (std::size_t k = 0; k < current.size(); ++k)
        current[k] = std::norm(a.samples[start + k] + b.samples[start + k]);
    return welch_psd(current, a.grid.dt, segment_samples, min_segments);
}

} // namespace homsim
