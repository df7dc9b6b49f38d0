#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homsim/detect.hpp"
#include "homsim/field.hpp"

namespace homsim {

/// Coincidence-fringe model: baseline * (1 - V * exp(-gamma*|tau|) *
/// cos(omega*tau)).
struct HomModel {
    double visibility = 0.5;
    double gamma_rate = 3.14159e7; ///< mutual-coherence decay [1/s]
    double omega_diff = 0.0;       ///< angular beat frequency [rad/s]
    double baseline = 1.0;

    void validate() const {
        if (visibility < 0.0) throw ConfigError("HomModel: visibility must be >= 0");
        if (!(gamma_rate > 0.0)) throw ConfigError("HomModel: gamma_rate must be > 0");
        if (!(baseline > 0.0)) throw ConfigError("HomModel: baseline must be > 0");
    }
};

/// Normalized coincidence probability at delay tau.
double analytic_pcoin(double tau, const HomModel& model);

/// Mean of analytic_pcoin over [tau_lo, tau_hi] (closed form); what a
/// histogram bin of that extent measures.
double analytic_pcoin_bin(double tau_lo, double tau_hi, const HomModel& model);

/// Mutual-coherence decay rate of two independent Lorentzian lasers:
/// pi * (dnu_a + dnu_b).
double gamma_from_linewidths(double dnu_a, double dnu_b);

/// Welch-estimated one-sided power spectral density.
struct Spectrum {
    double df = 0.0;            ///< bin spacing [Hz]; freqs are k*df
    std::vector<double> psd;    ///< [power/Hz]
    double resolution_bw = 0.0; ///< Hann equivalent noise bandwidth [Hz]

    double freq_at(std::size_t k) const { return df * static_cast<double>(k); }
};

/// PSD of the beat photocurrent |a(t)+b(t)|^2. Hann window, 50% overlap,
/// per-segment mean removed. `segment_samples` 0 picks a power of two giving
/// at least `min_segments` averages.
Spectrum beat_psd(const FieldTrajectory& a, const FieldTrajectory& b,
                  std::size_t segment_samples = 0, std::size_t min_segments = 16);

/// Welch PSD of an arbitrary real series (the machinery behind beat_psd).
Spectrum welch_psd(const std::vector<double>& series, double dt,
                   std::size_t segment_samples, std::size_t min_segments = 16);

/// Full width at half maximum of the highest non-DC peak, linear
/// interpolation on both flanks. Requires the peak to clear 3x the median
/// floor.
double fwhm(const Spectrum& spec);

/// Center of the highest non-DC peak, parabolic interpolation over the
/// neighboring bins.
double peak_frequency(const Spectrum& spec);

/// Weighted nonlinear least-squares fit of the fringe model.
struct HomFitResult {
    HomModel model;
    std::array<double, 4> std_error{}; ///< V, gamma, omega, baseline
    double residual_rms = 0.0;         ///< RMS residual in normalized units
    double mean_bin_sigma = 0.0;       ///< mean statistical error per bin
    bool converged = false;
    int iterations = 0;
};

HomFitResult fit_hom(const CoincidenceHistogram& hist);

/// V = 1 - min(normalized)/baseline over the central |tau| <= 3/gamma region.
/// `gamma_hint` defaults to the two-5-MHz-laser rate.
double visibility(const CoincidenceHistogram& hist,
                  double gamma_hint = 3.14159265358979e7);

/// One optical line for the cavity-scan emulation.
struct CavityLine {
    double nu_offset = 0.0; ///< [Hz]
    double power = 1.0;     ///< [W]
    double linewidth = 0.0; ///< [Hz]
};

struct FpScanTrace {
    std::vector<double> freqs;        ///< scan detuning [Hz], centered on 0
    std::vector<double> transmission; ///< [W]
};

/// Sum of Lorentzian transmission peaks over cavity orders; peak FWHM is
/// fsr/finesse plus the line's own width.
FpScanTrace fp_scan(const std::vector<CavityLine>& lines, double fsr,
                    double finesse, double scan_range, std::size_t n_points);

/// Centers of the `n` highest well-separated peaks of a scan trace
/// (parabolic interpolation), sorted ascending. Used to read frequency
/// differences off the cavity scan.
std::vector<double> scan_peaks(const FpScanTrace& trace, std::size_t n);

} // namespace homsim
