#include "homsim/channel.hpp"

#include <cmath>

namespace homsim {

std::vector<double> BsPorts::port_intensity(const FieldTrajectory& f) const {
    std::vector<double> out(f.samples.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::norm(f.samples[k]) + orthogonal_intensity[k];
    return out;
}

FieldTrajectory propagate(const FieldTrajectory& field, const FiberSpec& fiber) {
    fiber.validate();
    const double delay = fiber.delay_s();
    const auto shift = static_cast<std::int64_t>(std::llround(delay / field.grid.dt));
    if (shift >= field.grid.n_samples)
        throw SimError("propagate: fiber delay exceeds the trajectory span");
    FieldTrajectory out;
    out.grid = field.grid;
    out.nu_offset = field.nu_offset;
    out.valid_from = field.valid_from + shift;
    out.samples.assign(field.samples.size(), {0.0, 0.0});
    const double g = fiber.amplitude_factor();
    for (std::int64_t k = shift; k < field.size(); ++k)
        out.samples[static_cast<std::size_t>(k)] =
            g * field.samples[static_cast<std::size_t>(k - shift)];
    return out;
}

FieldTrajectory aom_shift(const FieldTrajectory& field, double f_shift) {
    if (std::abs(f_shift) * field.grid.dt >= 0.02)
        throw ConfigError("aom_shift: |f_shift|*dt >= 0.02 cycles; decrease dt");
    FieldTrajectory out;
    out.grid = field.grid;
    out.nu_offset = field.nu_offset + f_shift;
    out.valid_from = field.valid_from;
    out.samples.resize(field.samples.size());
    const double w = kTwoPi * f_shift;
    for (std::int64_t k = 0; k < field.size(); ++k) {
        const auto idx = static_cast<std::size_t>(k);
        out.samples[idx] =
            field.samples[idx] *
            std::polar(1.0, w * field.grid.time_at(k));
    }
    return out;
}

BsPorts beamsplitter(const FieldTrajectory& a, const FieldTrajectory& b,
                     double pol_overlap) {
    if (!a.grid.same_as(b.grid))
        throw SimError("beamsplitter: input grids differ");
    if (!(pol_overlap >= 0.0 && pol_overlap <= 1.0))
        throw ConfigError("beamsplitter: pol_overlap must be in [0, 1]");
    const double s = pol_overlap;
    const double orth = 0.5 * (1.0 - s * s);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    BsPorts ports;
    ports.out1.grid = a.grid;
    ports.out2.grid = a.grid;
    ports.out1.nu_offset = a.nu_offset;
    ports.out2.nu_offset = a.nu_offset;
    ports.out1.valid_from = std::max(a.valid_from, b.valid_from);
    ports.out2.valid_from = ports.out1.valid_from;
    const std::size_t n = a.samples.size();
    ports.out1.samples.resize(n);
    ports.out2.samples.resize(n);
    ports.orthogonal_intensity.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto va = a.samples[k];
        const auto vb = s * b.samples[k];
        ports.out1.samples[k] = (va + vb) * inv_sqrt2;
        ports.out2.samples[k] = (va - vb) * inv_sqrt2;
        ports.orthogonal_intensity[k] = orth * std::norm(b.samples[k]);
    }
    return ports;
}

} // namespace homsim
