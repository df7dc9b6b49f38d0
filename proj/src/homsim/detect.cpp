#include "homsim/detect.hpp"

#include <algorithm>
#include <cmath>

namespace homsim {

ClickGenerator::ClickGenerator(const DetectorSpec& det, double rate_per_watt,
                               double dt, std::uint64_t seed)
    : det_(det), gain_(det.efficiency * rate_per_watt), dt_(dt), rng_(seed) {
    det.validate();
    if (!(rate_per_watt >= 0.0))
        throw ConfigError("ClickGenerator: rate_per_watt must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("ClickGenerator: dt must be > 0");
}

void ClickGenerator::feed(std::span<const double> intensity, double t0) {
    for (std::size_t k = 0; k < intensity.size(); ++k) {
        const double rate = gain_ * intensity[k] + det_.dark_rate;
        const double mu = rate * dt_;
        if (mu > 0.1)
            throw ConfigError(
                "clicks_from_intensity: rate*dt > 0.1; lower rate_per_watt or dt");
        const double p = -std::expm1(-mu);
        if (rng_.uniform() < p) {
            ++raw_count_;
            const double t = t0 + (static_cast<double>(k) + rng_.uniform()) * dt_;
            if (t - last_accepted_ >= det_.dead_time) {
                clicks_.push_back(t);
                last_accepted_ = t;
            }
        }
    }
}

ClickStream ClickGenerator::finalize(double span) {
    ClickStream out;
    out.span = span;
    out.timestamps = std::move(clicks_);
    clicks_.clear();
    if (det_.jitter_sigma > 0.0) {
        std::vector<double> jittered;
        jittered.reserve(out.timestamps.size());
        for (double t : out.timestamps) {
            const double tj = t + rng_.normal(0.0, det_.jitter_sigma);
            if (tj >= 0.0 && tj <= span) jittered.push_back(tj);
        }
        out.timestamps = std::move(jittered);
        std::sort(out.timestamps.begin(), out.timestamps.end());
    }
    return out;
}

ClickStream clicks_from_intensity(std::span<const double> intensity, double dt,
                                  const DetectorSpec& det, double rate_per_watt,
                                  std::uint64_t seed) {
    ClickGenerator gen(det, rate_per_watt, dt, seed);
    gen.feed(intensity, 0.0);
    return gen.finalize(dt * static_cast<double>(intensity.size()));
}

double CoincidenceHistogram::sigma(std::int64_t i) const {
    if (baseline_mean <= 0.0) return 0.0;
    const auto r = raw[static_cast<std::size_t>(i)];
    return std::sqrt(static_cast<double>(std::max<std::int64_t>(r, 1))) /
           baseline_mean;
}

void CoincidenceHistogram::merge(const CoincidenceHistogram& other) {
    if (other.bin_width != bin_width || other.k_max != k_max)
        throw SimError("CoincidenceHistogram::merge: binning mismatch");
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += other.raw[i];
    accumulation_time += other.accumulation_time;
    valid = valid || other.valid;
}

void CoincidenceHistogram::normalize() {
    normalized.assign(raw.size(), 0.0);
    if (!valid) return;
    double sum = 0.0;
    std::int64_t n = 0;
    const double edge = 0.75 * max_tau();
    for (std::int64_t i = 0; i < n_bins(); ++i) {
        if (std::abs(tau_center(i)) >= edge) {
            sum += static_cast<double>(raw[static_cast<std::size_t>(i)]);
            ++n;
        }
    }
    baseline_mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    if (baseline_mean <= 0.0)
        throw SimError("coincidence_histogram: zero baseline, cannot normalize");
    for (std::size_t i = 0; i < raw.size(); ++i)
        normalized[i] = static_cast<double>(raw[i]) / baseline_mean;
}

CoincidenceHistogram make_histogram(double bin_width, double max_tau) {
    if (!(bin_width > 0.0))
        throw ConfigError("coincidence_histogram: bin_width must be > 0");
    if (!(max_tau >= bin_width))
        throw ConfigError("coincidence_histogram: max_tau must be >= bin_width");
    CoincidenceHistogram h;
    h.bin_width = bin_width;
    h.k_max = static_cast<std::int64_t>(std::llround(max_tau / bin_width));
    h.raw.assign(static_cast<std::size_t>(h.n_bins()), 0);
    return h;
}

void accumulate_pairs(const ClickStream& s1, const ClickStream& s2,
                      CoincidenceHistogram& hist) {
    const double window =
        (static_cast<double>(hist.k_max) + 0.5) * hist.bin_width;
    const auto& a = s1.timestamps;
    const auto& b = s2.timestamps;
    if (a.empty() || b.empty()) {
        hist.accumulation_time += std::min(s1.span, s2.span);
        return;
    }
    hist.valid = true;
    std::size_t lo = 0;
    for (const double t1 : a) {
        while (lo < b.size() && b[lo] < t1 - window) ++lo;
        for (std::size_t j = lo; j < b.size() && b[j] <= t1 + window; ++j) {
            const auto k =
                static_cast<std::int64_t>(std::llround((b[j] - t1) / hist.bin_width));
            if (k >= -hist.k_max && k <= hist.k_max)
                ++hist.raw[static_cast<std::size_t>(k + hist.k_max)];
        }
    }
    hist.accumulation_time += std::min(s1.span, s2.span);
}

CoincidenceHistogram coincidence_histogram(const ClickStream& s1,
                                           const ClickStream& s2,
                                           double bin_width, double max_tau) {
    CoincidenceHistogram h = make_histogram(bin_width, max_tau);
    accumulate_pairs(s1, s2, h);
    if (h.valid) h.normalize();
    return h;
}

} // namespace homsim
