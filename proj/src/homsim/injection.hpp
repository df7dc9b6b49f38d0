#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "homsim/field.hpp"
#include "homsim/phasenoise.hpp"
#include "homsim/rng.hpp"

namespace homsim {

/// One calibration point for the locking-bandwidth power law.
struct BandwidthPoint {
    double injection_power = 0.0;   ///< [W]
    double slave_power = 0.0;       ///< [W]
    double measured_bandwidth = 0.0;///< [Hz]
};

/// Injection-locking channel parameters. kappa = kappa_coeff *
/// sqrt(injection_power / slave_power) is the locking bandwidth.
struct InjectionConfig {
    double injection_power = 4e-6;  ///< master power arriving at the slave [W]
    double slave_power = 10e-3;     ///< [W]
    double kappa_coeff = 2.1939e10; ///< [Hz]
    LaserSpec slave;                ///< free-running center and intrinsic linewidth
    double slave_noise_factor = 1.0;///< scales the slave's intrinsic diffusion

    void validate() const {
        if (injection_power < 0.0)
            throw ConfigError("InjectionConfig: injection_power must be >= 0");
        if (!(slave_power > 0.0))
            throw ConfigError("InjectionConfig: slave_power must be > 0");
        if (!(kappa_coeff > 0.0))
            throw ConfigError("InjectionConfig: kappa_coeff must be > 0");
        if (slave_noise_factor < 0.0)
            throw ConfigError("InjectionConfig: slave_noise_factor must be >= 0");
        slave.validate();
    }
};

/// Outcome of a locking run.
struct LockReport {
    bool locked = false;
    double detuning = 0.0;          ///< free-running slave minus injected carrier [Hz]
    double locking_bandwidth = 0.0; ///< kappa [Hz]
    double mean_freq_error = 0.0;   ///< slave mean frequency minus injected carrier [Hz]
};

/// kappa = kappa_coeff * sqrt(P_inj / P_slave): the maximum free-running
/// detuning that still locks.
double locking_bandwidth(const InjectionConfig& cfg);

/// Least-squares fit of kappa_coeff over the square-root power-ratio model.
/// Exact solve for a single point.
double calibrate_kappa(const std::vector<BandwidthPoint>& points);

/// Streaming Adler phase stepper:
///   d(psi)/dt = 2*pi*nu_free + 2*pi*kappa*sin(arg(u_inj) - psi) + xi(t)
/// with xi the slave's intrinsic Wiener noise (variance
/// 2*pi*noise_factor*linewidth*dt per step). Used by simulate_slave and by
/// the scenario engine's chunked pipeline.
class AdlerStepper {
public:
    AdlerStepper(const InjectionConfig& cfg, double injected_nu_offset,
                 double dt, std::uint64_t seed);

    /// Advances one step given the injected sample; returns the slave's total
    /// baseband phase for the current sample. A zero injected sample (delay
    /// padding) steps the free-running dynamics only.
    double step(std::complex<double> injected_sample);

    double kappa() const { return kappa_; }
    double detuning() const { return detuning_; }

private:
    double dt_;
    double kappa_;
    double detuning_;
    double omega_free_;  // 2*pi*(free-running offset) [rad/s]
    double sigma_;       // per-step noise std dev [rad]
    double psi_;
    Rng rng_;
};

/// Integrates the slave under injection of `injected` over its grid; the
/// output field has sqrt(slave_power) amplitude and the slave's phase. The
/// lock report is computed from the mean instantaneous-frequency error over
/// the final 80% of the run (threshold: 1% of kappa).
std::pair<FieldTrajectory, LockReport> simulate_slave(
    const FieldTrajectory& injected, const InjectionConfig& cfg,
    const SimGrid& grid);

/// Beat FWHM between two fields with an extra relative delay applied to
/// `master` (integer samples, no attenuation). Wraps beat_psd + fwhm.
double beat_linewidth_check(const FieldTrajectory& master,
                            const FieldTrajectory& slave, double delay);

} // namespace homsim
