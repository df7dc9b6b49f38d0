#pragma once

#include <cstdint>
#include <vector>

#include "homsim/field.hpp"
#include "homsim/rng.hpp"

namespace homsim {

enum class DriftKind { none, linear, random_walk };

/// Slow center-frequency drift. `rate_hz_per_hour` is the deterministic slope
/// for `linear` and the one-hour standard deviation for `random_walk`.
struct DriftModel {
    DriftKind kind = DriftKind::none;
    double rate_hz_per_hour = 0.0;

    void validate() const {
        if (rate_hz_per_hour < 0.0)
            throw ConfigError("DriftModel: magnitude must be >= 0");
    }
};

/// One CW laser: center frequency as a baseband offset from the shared
/// simulation reference, Lorentzian FWHM linewidth, emitted power, drift.
struct LaserSpec {
    double nu_offset = 0.0;       ///< [Hz]
    double linewidth_fwhm = 0.0;  ///< [Hz]
    double power = 1e-3;          ///< [W]
    DriftModel drift;

    void validate() const {
        if (!(linewidth_fwhm >= 0.0))
            throw ConfigError("LaserSpec: linewidth_fwhm must be >= 0");
        if (!(power > 0.0)) throw ConfigError("LaserSpec: power must be > 0");
        if (!std::isfinite(nu_offset))
            throw ConfigError("LaserSpec: nu_offset must be finite");
        drift.validate();
    }
};

/// Incremental generator behind gen_phase_trajectory, also used by the
/// scenario engine to stream long spans chunk by chunk without materializing
/// whole trajectories.
///
/// phase[0] ~ U[0, 2pi); increments are N(0, 2*pi*linewidth*dt) plus the
/// drift ramp. Wiener phase with this increment variance gives a Lorentzian
/// field line of FWHM = linewidth_fwhm.
class WienerPhaseSource {
public:
    WienerPhaseSource(const LaserSpec& spec, double dt, std::uint64_t seed);

    /// Phase of sample k (call with k = 0, 1, 2, ... exactly once each).
    double next();

    double dt() const { return dt_; }

private:
    double dt_;
    double sigma_;              // per-step Wiener std dev [rad]
    double omega_;              // 2*pi*nu_offset [rad/s]
    double drift_slope_;        // linear drift [Hz/s]
    double drift_sigma_;        // per-step random-walk freq std dev [Hz]
    double drift_freq_ = 0.0;   // accumulated random-walk offset [Hz]
    double phase_;
    std::int64_t k_ = 0;
    Rng rng_;
    bool linear_drift_;
};

/// Stochastic phase trajectory of one laser on `grid`. Deterministic given
/// (spec, grid, grid.seed). Rejects grids too coarse for the linewidth
/// (linewidth * dt > 0.01).
std::vector<double> gen_phase_trajectory(const LaserSpec& spec, const SimGrid& grid);

/// sample[k] = sqrt(power) * exp(i * (2*pi*nu_offset*t_k + phase[k])).
FieldTrajectory field_from_phase(const LaserSpec& spec, const SimGrid& grid,
                                 const std::vector<double>& phases);

/// Coherence length L_c = c / linewidth (the convention that puts 5 MHz at
/// roughly 60 m).
double coherence_length(double linewidth_fwhm);

} // namespace homsim
