#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "homsim/common.hpp"

namespace homsim {

/// Uniform time grid plus the seed that makes everything derived from it
/// reproducible.
struct SimGrid {
    double dt = 0.0;            ///< sample spacing [s]
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;

    double span() const { return dt * static_cast<double>(n_samples); }
    double time_at(std::int64_t k) const { return dt * static_cast<double>(k); }

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("SimGrid: dt must be > 0");
        if (n_samples < 2) throw ConfigError("SimGrid: n_samples must be >= 2");
    }

    bool same_as(const SimGrid& other) const {
        return dt == other.dt && n_samples == other.n_samples;
    }
};

/// Complex baseband envelope on a SimGrid. |sample|^2 is instantaneous power
/// in watts. Optical carriers are tracked as offsets from a shared simulation
/// reference, so the samples contain the full rotation at nu_offset and
/// nu_offset itself is bookkeeping for downstream stages.
struct FieldTrajectory {
    SimGrid grid;
    std::vector<std::complex<double>> samples;
    double nu_offset = 0.0;     ///< carrier offset from the shared reference [Hz]
    std::int64_t valid_from = 0; ///< first sample index carrying signal (delay padding before)

    std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
};

} // namespace homsim
