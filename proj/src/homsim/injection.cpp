#include "homsim/injection.hpp"

#include <cmath>

#include "homsim/analysis.hpp"

namespace homsim {

double locking_bandwidth(const InjectionConfig& cfg) {
    cfg.validate();
    return cfg.kappa_coeff * std::sqrt(cfg.injection_power / cfg.slave_power);
}

double calibrate_kappa(const std::vector<BandwidthPoint>& points) {
    if (points.empty())
        throw ConfigError("calibrate_kappa: at least one calibration point required");
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        if (!(p.injection_power > 0.0) || !(p.slave_power > 0.0))
            throw ConfigError("calibrate_kappa: powers must be > 0");
        const double x = std::sqrt(p.injection_power / p.slave_power);
        sxx += x * x;
        sxy += x * p.measured_bandwidth;
    }
    return sxy / sxx;
}

AdlerStepper::AdlerStepper(const InjectionConfig& cfg, double injected_nu_offset,
                           double dt, std::uint64_t seed)
    : dt_(dt),
      kappa_(locking_bandwidth(cfg)),
      detuning_(cfg.slave.nu_offset - injected_nu_offset),
      omega_free_(kTwoPi * cfg.slave.nu_offset),
      sigma_(std::sqrt(kTwoPi * cfg.slave_noise_factor *
                       cfg.slave.linewidth_fwhm * dt)),
      rng_(seed) {
    if (!(dt > 0.0)) throw ConfigError("AdlerStepper: dt must be > 0");
    if (kappa_ * dt > 0.02)
        throw ConfigError("simulate_slave: kappa*dt > 0.02; decrease dt");
    psi_ = rng_.uniform_angle();
}

double AdlerStepper::step(std::complex<double> injected_sample) {
    const double out = psi_;
    double coupling = 0.0;
    const double mag2 = std::norm(injected_sample);
    if (mag2 > 0.0) {
        // sin(arg(inj) - psi) without explicit arg/unwrap
        const std::complex<double> u =
            injected_sample * std::polar(1.0, -psi_);
        coupling = kTwoPi * kappa_ * (u.imag() / std::sqrt(mag2));
    }
    double dpsi = (omega_free_ + coupling) * dt_;
    if (sigma_ != 0.0) dpsi += rng_.normal(0.0, sigma_);
    psi_ += dpsi;
    return out;
}

std::pair<FieldTrajectory, LockReport> simulate_slave(
    const FieldTrajectory& injected, const InjectionConfig& cfg,
    const SimGrid& grid) {
    grid.validate();
    cfg.validate();
    if (!injected.grid.same_as(grid))
        throw SimError("simulate_slave: injected field grid mismatch");

    AdlerStepper stepper(cfg, injected.nu_offset, grid.dt,
                         Rng::substream(grid.seed, 0,
                                        static_cast<std::uint64_t>(
                                            StreamTag::slave_noise)));
    FieldTrajectory out;
    out.grid = grid;
    out.valid_from = injected.valid_from;
    out.samples.resize(injected.samples.size());
    const double amp = std::sqrt(cfg.slave_power);

    const auto n = grid.n_samples;
    const auto start = n - (n * 8) / 10;  // final 80% of the run
    double psi_start = 0.0;
    double psi_last = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        const double psi = stepper.step(injected.samples[static_cast<std::size_t>(k)]);
        out.samples[static_cast<std::size_t>(k)] = std::polar(amp, psi);
        if (k == start) psi_start = psi;
        if (k == n - 1) psi_last = psi;
    }

    LockReport report;
    report.locking_bandwidth = stepper.kappa();
    report.detuning = stepper.detuning();
    const double t_window = grid.dt * static_cast<double>(n - 1 - start);
    const double mean_freq =
        (psi_last - psi_start) / (kTwoPi * t_window);
    report.mean_freq_error = mean_freq - injected.nu_offset;
    report.locked =
        std::abs(report.mean_freq_error) <= 0.01 * report.locking_bandwidth;
    out.nu_offset = report.locked ? injected.nu_offset
                                  : injected.nu_offset + report.mean_freq_error;
    return {std::move(out), report};
}

double beat_linewidth_check(const FieldTrajectory& master,
                            const FieldTrajectory& slave, double delay) {
    if (!master.grid.same_as(slave.grid))
        throw SimError("beat_linewidth_check: grid mismatch");
    const auto shift =
        static_cast<std::int64_t>(std::llround(delay / master.grid.dt));
    if (shift < 0 || shift >= master.grid.n_samples)
        throw SimError("beat_linewidth_check: delay outside trajectory span");
    FieldTrajectory delayed;
    delayed.grid = master.grid;
    delayed.nu_offset = master.nu_offset;
    delayed.valid_from = master.valid_from + shift;
    delayed.samples.assign(master.samples.size(), {0.0, 0.0});
    for (std::int64_t k = shift; k < master.size(); ++k)
        delayed.samples[static_cast<std::size_t>(k)] =
            master.samples[static_cast<std::size_t>(k - shift)];
    const Spectrum spec = beat_psd(delayed, slave);
    return fwhm(spec);
}

} // namespace homsim
