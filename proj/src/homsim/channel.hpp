#pragma once

#include <vector>

#include "homsim/field.hpp"

namespace homsim {

/// Passive fiber link: group delay plus attenuation. Dispersion is irrelevant
/// for a CW carrier and is not modeled.
struct FiberSpec {
    double length_km = 0.0;
    double attenuation_db_per_km = 0.2;
    double group_index = 1.468;

    void validate() const {
        if (length_km < 0.0) throw ConfigError("FiberSpec: length must be >= 0");
        if (attenuation_db_per_km < 0.0)
            throw ConfigError("FiberSpec: attenuation must be >= 0");
        if (group_index < 1.0)
            throw ConfigError("FiberSpec: group_index must be >= 1");
    }

    double delay_s() const { return length_km * 1e3 * group_index / kSpeedOfLight; }
    double loss_db() const { return attenuation_db_per_km * length_km; }
    double amplitude_factor() const { return std::pow(10.0, -loss_db() / 20.0); }
};

/// 50:50 beam splitter outputs. `out1`/`out2` carry the coherent (parallel
/// polarization) part; `orthogonal_intensity` is the per-sample incoherent
/// contribution (1-s^2)|b|^2/2 that adds equally to both port intensities.
struct BsPorts {
    FieldTrajectory out1;
    FieldTrajectory out2;
    std::vector<double> orthogonal_intensity;

    std::vector<double> intensity1() const { return port_intensity(out1); }
    std::vector<double> intensity2() const { return port_intensity(out2); }

private:
    std::vector<double> port_intensity(const FieldTrajectory& f) const;
};

/// Delays by round(length*n_g/c/dt) samples (leading region zero-padded and
/// reflected in valid_from) and scales amplitude by the fiber loss.
FieldTrajectory propagate(const FieldTrajectory& field, const FiberSpec& fiber);

/// Multiplies by exp(i*2*pi*f_shift*t) and updates the carrier bookkeeping.
FieldTrajectory aom_shift(const FieldTrajectory& field, double f_shift);

/// Interferes `a` and `b` with scalar polarization overlap s in [0, 1]:
/// the parallel component s*b combines coherently, (a +- s*b)/sqrt(2);
/// the orthogonal remainder adds incoherently to both output intensities.
BsPorts beamsplitter(const FieldTrajectory& a, const FieldTrajectory& b,
                     double pol_overlap);

} // namespace homsim
