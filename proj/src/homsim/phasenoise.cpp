#include "homsim/phasenoise.hpp"

#include <cmath>

namespace homsim {

namespace {
constexpr double kSecondsPerHour = 3600.0;
}

WienerPhaseSource::WienerPhaseSource(const LaserSpec& spec, double dt,
                                     std::uint64_t seed)
    : dt_(dt),
      sigma_(std::sqrt(kTwoPi * spec.linewidth_fwhm * dt)),
      omega_(kTwoPi * spec.nu_offset),
      drift_slope_(0.0),
      drift_sigma_(0.0),
      rng_(seed),
      linear_drift_(spec.drift.kind == DriftKind::linear) {
    spec.validate();
    if (!(dt > 0.0)) throw ConfigError("WienerPhaseSource: dt must be > 0");
    if (spec.linewidth_fwhm * dt > 0.01)
        throw ConfigError(
            "phase grid too coarse: linewidth_fwhm*dt > 0.01 cycles; decrease dt");
    if (spec.drift.kind == DriftKind::linear) {
        drift_slope_ = spec.drift.rate_hz_per_hour / kSecondsPerHour;
    } else if (spec.drift.kind == DriftKind::random_walk) {
        drift_sigma_ =
            spec.drift.rate_hz_per_hour * std::sqrt(dt / kSecondsPerHour);
    }
    phase_ = rng_.uniform_angle();
}

double WienerPhaseSource::next() {
    const double out = phase_;
    double dphi = sigma_ != 0.0 ? rng_.normal(0.0, sigma_) : 0.0;
    if (linear_drift_) {
        // instantaneous frequency offset ramps as slope * t
        dphi += kTwoPi * drift_slope_ * (static_cast<double>(k_) * dt_) * dt_;
    } else if (drift_sigma_ != 0.0) {
        drift_freq_ += rng_.normal(0.0, drift_sigma_);
        dphi += kTwoPi * drift_freq_ * dt_;
    }
    phase_ += dphi;
    ++k_;
    return out;
}

std::vector<double> gen_phase_trajectory(const LaserSpec& spec,
                                         const SimGrid& grid) {
    grid.validate();
    WienerPhaseSource src(spec, grid.dt, grid.seed);
    std::vector<double> phases(static_cast<std::size_t>(grid.n_samples));
    for (auto& p : phases) p = src.next();
    return phases;
}

FieldTrajectory field_from_phase(const LaserSpec& spec, const SimGrid& grid,
                                 const std::vector<double>& phases) {
    grid.validate();
    spec.validate();
    if (static_cast<std::int64_t>(phases.size()) != grid.n_samples)
        throw SimError("field_from_phase: phases length does not match grid");
    FieldTrajectory out;
    out.grid = grid;
    out.nu_offset = spec.nu_offset;
    out.samples.resize(phases.size());
    const double amp = std::sqrt(spec.power);
    const double omega = kTwoPi * spec.nu_offset;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const double arg = omega * grid.time_at(static_cast<std::int64_t>(k)) +
                           phases[k];
        out.samples[k] = std::polar(amp, arg);
    }
    return out;
}

double coherence_length(double linewidth_fwhm) {
    if (!(linewidth_fwhm > 0.0))
        throw ConfigError("coherence_length: linewidth must be > 0");
    return kSpeedOfLight / linewidth_fwhm;
}

} // namespace homsim
