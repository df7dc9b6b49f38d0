#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "homsim/common.hpp"
#include "homsim/rng.hpp"

namespace homsim {

/// SNSPD parameters. Non-paralyzable dead time; Gaussian timing jitter.
struct DetectorSpec {
    double efficiency = 0.8;
    double dark_rate = 100.0;     ///< [Hz]
    double dead_time = 10e-9;     ///< [s]
    double jitter_sigma = 50e-12; ///< [s]

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0))
            throw ConfigError("DetectorSpec: efficiency must be in [0, 1]");
        if (dark_rate < 0.0 || dead_time < 0.0 || jitter_sigma < 0.0)
            throw ConfigError("DetectorSpec: rates/times must be >= 0");
    }
};

/// Sorted detector event timestamps over [0, span].
struct ClickStream {
    std::vector<double> timestamps;
    double span = 0.0;
};

/// Streaming click generator: feed per-sample intensities in time order,
/// finalize() applies jitter and re-sorts. Dead-time pruning happens online,
/// on the pre-jitter stream. One instance per detector per trial.
class ClickGenerator {
public:
    ClickGenerator(const DetectorSpec& det, double rate_per_watt, double dt,
                   std::uint64_t seed);

    /// Consumes intensities [W] for samples starting at absolute time t0.
    void feed(std::span<const double> intensity, double t0);

    ClickStream finalize(double span);

    std::int64_t raw_click_count() const { return raw_count_; }

private:
    DetectorSpec det_;
    double gain_;  // efficiency * rate_per_watt
    double dt_;
    Rng rng_;
    double last_accepted_ = -1e300;
    std::int64_t raw_count_ = 0;
    std::vector<double> clicks_;
};

/// Inhomogeneous Poisson clicks from a sampled intensity via per-sample
/// thinning: rate(t) = efficiency*rate_per_watt*I(t) + dark_rate; requires
/// rate*dt <= 0.1 everywhere. Click instants are drawn uniformly inside their
/// sample so downstream binning sees continuous times.
ClickStream clicks_from_intensity(std::span<const double> intensity, double dt,
                                  const DetectorSpec& det, double rate_per_watt,
                                  std::uint64_t seed);

/// Binned, baseline-normalized full cross-correlation of two click streams.
struct CoincidenceHistogram {
    double bin_width = 0.0;             ///< [s]
    std::int64_t k_max = 0;             ///< bins run k = -k_max .. +k_max
    std::vector<std::int64_t> raw;      ///< size 2*k_max+1
    std::vector<double> normalized;
    double baseline_mean = 0.0;         ///< mean raw count of outer-25% bins
    double accumulation_time = 0.0;     ///< total span correlated [s]
    bool valid = false;                 ///< false for empty input streams

    std::int64_t n_bins() const { return 2 * k_max + 1; }
    double tau_center(std::int64_t i) const {
        return static_cast<double>(i - k_max) * bin_width;
    }
    double max_tau() const { return static_cast<double>(k_max) * bin_width; }
    /// One-sigma statistical error of normalized[i].
    double sigma(std::int64_t i) const;

    /// Accumulates raw counts from another histogram on the same binning.
    void merge(const CoincidenceHistogram& other);
    /// Computes baseline and normalized values from raw counts.
    void normalize();
};

CoincidenceHistogram coincidence_histogram(const ClickStream& s1,
                                           const ClickStream& s2,
                                           double bin_width, double max_tau);

/// Pair counting only (no normalization); used to accumulate across trials.
void accumulate_pairs(const ClickStream& s1, const ClickStream& s2,
                      CoincidenceHistogram& hist);

CoincidenceHistogram make_histogram(double bin_width, double max_tau);

} // namespace homsim
