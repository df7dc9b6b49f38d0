#pragma once

#include <cmath>
#include <cstdint>

namespace homsim {

/// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
/// bit-reproducible across platforms and standard-library versions; the
/// distributions in <random> carry no such guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, 2*pi).
    double uniform_angle() { return uniform() * 6.283185307179586476925286766559; }

    /// Standard normal via polar Box-Muller (spare value cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Exponential with unit mean.
    double exponential() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return -std::log(u);
    }

    /// Derives an independent seed for a labelled substream, e.g.
    /// (run seed, trial index, role tag). Pure function of its inputs.
    static std::uint64_t substream(std::uint64_t seed, std::uint64_t index,
                                   std::uint64_t tag = 0) {
        std::uint64_t x = seed;
        x ^= 0x9e3779b97f4a7c15ULL + splitmix64_once(index);
        x = splitmix64_once(x) ^ splitmix64_once(tag + 0xd6e8feb86659fd93ULL);
        return splitmix64_once(x);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        return splitmix64_once(x);
    }

    static std::uint64_t splitmix64_once(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Role tags for per-trial substreams. Values are part of the reproducibility
/// contract: changing them changes every seeded result.
enum class StreamTag : std::uint64_t {
    master_phase = 1,
    slave_noise = 2,
    detector_a = 3,
    detector_b = 4,
    init_phase = 5,
    bob_phase = 6,
    drift = 7,
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial,
                                    StreamTag tag) {
    return Rng::substream(seed, trial, static_cast<std::uint64_t>(tag));
}

} // namespace homsim
