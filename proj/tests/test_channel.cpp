#include <cmath>

#include "doctest.h"
#include "homsim/channel.hpp"
#include "homsim/phasenoise.hpp"
#include "homsim/rng.hpp"

using namespace homsim;

namespace {

FieldTrajectory random_field(std::uint64_t seed, double power = 1e-3,
                             std::int64_t n = 4096, double dt = 0.2e-9) {
    SimGrid grid{dt, n, seed};
    LaserSpec s;
    s.linewidth_fwhm = 5e6;
    s.power = power;
    return field_from_phase(s, grid, gen_phase_trajectory(s, grid));
}

} // namespace

TEST_CASE("propagate: zero length is the identity") {
    const auto f = random_field(1);
    FiberSpec fiber{0.0, 0.2, 1.468};
    const auto out = propagate(f, fiber);
    for (std::size_t k = 0; k < f.samples.size(); ++k)
        CHECK(out.samples[k] == f.samples[k]);
    CHECK(out.valid_from == 0);
}

TEST_CASE("propagate: attenuation follows the dB formula") {
    // 25 km at 0.2 dB/km: power x 10^-0.5
    const auto f = random_field(2, 1e-3, 1 << 20);
    FiberSpec fiber{25.0, 0.2, 1.468};
    const auto out = propagate(f, fiber);
    const auto shift = static_cast<std::size_t>(out.valid_from);
    const double expect = 1e-3 * std::pow(10.0, -0.5);
    CHECK(std::norm(out.samples[shift + 7]) ==
          doctest::Approx(expect).epsilon(1e-9));
    for (std::size_t k = 0; k < shift; ++k)
        CHECK(std::norm(out.samples[k]) == 0.0);
}

TEST_CASE("propagate: 50 km group delay") {
    const double dt = 1e-7;
    SimGrid grid{dt, 4000, 9};
    LaserSpec s;
    s.power = 1.0;
    std::vector<double> zeros(4000, 0.0);
    const auto f = field_from_phase(s, grid, zeros);
    FiberSpec fiber{50.0, 0.2, 1.468};
    const auto out = propagate(f, fiber);
    // L*n_g/c = 244.84 us
    const double delay = static_cast<double>(out.valid_from) * dt;
    CHECK(delay == doctest::Approx(244.84e-6).epsilon(0.001));
}

TEST_CASE("propagate: delay beyond the span is an error") {
    const auto f = random_field(3, 1e-3, 128);
    FiberSpec fiber{50.0, 0.2, 1.468};
    CHECK_THROWS_AS(propagate(f, fiber), SimError);
}

TEST_CASE("propagate: two hops equal one long hop up to one-sample rounding") {
    const auto f = random_field(4, 1e-3, 1 << 20);
    FiberSpec a{10.0, 0.2, 1.468};
    FiberSpec b{15.0, 0.2, 1.468};
    FiberSpec ab{25.0, 0.2, 1.468};
    const auto two = propagate(propagate(f, a), b);
    const auto one = propagate(f, ab);
    CHECK(std::abs(two.valid_from - one.valid_from) <= 1);
    const auto k0 = static_cast<std::size_t>(
        std::max(two.valid_from, one.valid_from));
    const auto off = static_cast<std::size_t>(two.valid_from - one.valid_from);
    for (std::size_t k = k0; k < k0 + 64; ++k) {
        CHECK(two.samples[k].real() ==
              doctest::Approx(one.samples[k - off].real()).epsilon(1e-12));
        CHECK(two.samples[k].imag() ==
              doctest::Approx(one.samples[k - off].imag()).epsilon(1e-12));
    }
}

TEST_CASE("aom_shift: zero shift is the identity") {
    const auto f = random_field(5);
    const auto out = aom_shift(f, 0.0);
    for (std::size_t k = 0; k < f.samples.size(); ++k)
        CHECK(out.samples[k] == f.samples[k]);
}

TEST_CASE("aom_shift: inverse composition restores the field") {
    const auto f = random_field(6);
    const auto back = aom_shift(aom_shift(f, -80e6), 80e6);
    for (std::size_t k = 0; k < f.samples.size(); ++k) {
        CHECK(back.samples[k].real() ==
              doctest::Approx(f.samples[k].real()).epsilon(1e-12));
        CHECK(back.samples[k].imag() ==
              doctest::Approx(f.samples[k].imag()).epsilon(1e-12));
    }
    CHECK(back.nu_offset == doctest::Approx(f.nu_offset));
}

TEST_CASE("aom_shift: per-sample magnitude preserved, carrier bumped") {
    const auto f = random_field(7);
    const auto out = aom_shift(f, 80e6);
    CHECK(out.nu_offset == doctest::Approx(f.nu_offset + 80e6));
    for (std::size_t k = 0; k < f.samples.size(); ++k)
        CHECK(std::abs(out.samples[k]) ==
              doctest::Approx(std::abs(f.samples[k])).epsilon(1e-13));
}

TEST_CASE("aom_shift: aliasing precondition") {
    const auto f = random_field(8, 1e-3, 128, 1e-9);
    CHECK_THROWS_AS(aom_shift(f, 25e6), ConfigError); // 0.025 cycles/sample
}

TEST_CASE("beamsplitter: dark port with one input") {
    const auto a = random_field(9);
    FieldTrajectory b = a;
    for (auto& v : b.samples) v = 0.0;
    const auto ports = beamsplitter(a, b, 1.0);
    const auto i1 = ports.intensity1();
    const auto i2 = ports.intensity2();
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(i1[k] == doctest::Approx(0.5 * std::norm(a.samples[k])).epsilon(1e-12));
        CHECK(i2[k] == doctest::Approx(0.5 * std::norm(a.samples[k])).epsilon(1e-12));
    }
}

TEST_CASE("beamsplitter: identical inputs interfere fully") {
    const auto a = random_field(10);
    const auto ports = beamsplitter(a, a, 1.0);
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(std::norm(ports.out2.samples[k]) ==
              doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::norm(ports.out1.samples[k]) ==
              doctest::Approx(2.0 * std::norm(a.samples[k])).epsilon(1e-12));
    }
}

TEST_CASE("beamsplitter: per-sample energy conservation at any overlap") {
    const auto a = random_field(11, 2e-3);
    const auto b = random_field(12, 0.7e-3);
    for (const double s : {1.0, 0.98, 0.9, 0.5, 0.0}) {
        const auto ports = beamsplitter(a, b, s);
        const auto i1 = ports.intensity1();
        const auto i2 = ports.intensity2();
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            const double in = std::norm(a.samples[k]) + std::norm(b.samples[k]);
            const double out = i1[k] + i2[k];
            CHECK(std::abs(out - in) <= 1e-12 * in);
        }
    }
}

TEST_CASE("beamsplitter: grid and overlap validation") {
    const auto a = random_field(13);
    const auto b = random_field(14, 1e-3, 2048);
    CHECK_THROWS_AS(beamsplitter(a, b, 1.0), SimError);
    const auto c = random_field(15);
    CHECK_THROWS_AS(beamsplitter(a, c, 1.5), ConfigError);
}
