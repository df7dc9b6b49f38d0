#include <cmath>
#include <numeric>

#include "doctest.h"
#include "homsim/analysis.hpp"
#include "homsim/phasenoise.hpp"

using namespace homsim;

namespace {

LaserSpec dfb(double linewidth, double power = 10e-3, double nu = 0.0) {
    LaserSpec s;
    s.nu_offset = nu;
    s.linewidth_fwhm = linewidth;
    s.power = power;
    return s;
}

} // namespace

TEST_CASE("coherence length convention") {
    // 5 MHz linewidth sits at roughly 60 m
    CHECK(coherence_length(5e6) == doctest::Approx(59.96).epsilon(0.01));
    CHECK(coherence_length(kSpeedOfLight) == doctest::Approx(1.0));
    CHECK(coherence_length(10e6) == doctest::Approx(29.98).epsilon(0.01));
    CHECK_THROWS_AS(coherence_length(0.0), ConfigError);
    CHECK_THROWS_AS(coherence_length(-1.0), ConfigError);
}

TEST_CASE("zero linewidth gives a constant-increment phase sequence") {
    SimGrid grid{1e-9, 1000, 7};
    const auto phases = gen_phase_trajectory(dfb(0.0), grid);
    REQUIRE(phases.size() == 1000);
    for (std::size_t k = 1; k < phases.size(); ++k)
        CHECK(phases[k] == phases[0]);
}

TEST_CASE("increment statistics match 2*pi*linewidth*dt") {
    const double dnu = 5e6;
    const double dt = 0.1e-9;
    SimGrid grid{dt, 200001, 99};
    const auto phases = gen_phase_trajectory(dfb(dnu), grid);
    const double expected_var = kTwoPi * dnu * dt; // ~3.14e-3 rad^2

    double mean = 0.0, var = 0.0;
    const std::size_t n = phases.size() - 1;
    for (std::size_t k = 0; k < n; ++k) mean += phases[k + 1] - phases[k];
    mean /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = phases[k + 1] - phases[k] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);

    const double sigma_of_mean = std::sqrt(expected_var / static_cast<double>(n));
    CHECK(std::abs(mean) < 3.0 * sigma_of_mean);
    CHECK(var == doctest::Approx(expected_var).epsilon(0.05));
}

TEST_CASE("deterministic given (spec, grid, seed)") {
    SimGrid grid{0.2e-9, 5000, 1234};
    const auto a = gen_phase_trajectory(dfb(5e6), grid);
    const auto b = gen_phase_trajectory(dfb(5e6), grid);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);

    SimGrid other{0.2e-9, 5000, 1235};
    const auto c = gen_phase_trajectory(dfb(5e6), other);
    CHECK(a[1] != c[1]);
}

TEST_CASE("grid too coarse for the linewidth is rejected") {
    SimGrid grid{3e-9, 100, 1}; // 5 MHz * 3 ns = 0.015 > 0.01
    CHECK_THROWS_AS(gen_phase_trajectory(dfb(5e6), grid), ConfigError);
}

TEST_CASE("field_from_phase basics") {
    SimGrid grid{1e-9, 64, 5};
    std::vector<double> zeros(64, 0.0);

    SUBCASE("unit power, zero phase, zero offset") {
        const auto f = field_from_phase(dfb(0.0, 1.0), grid, zeros);
        for (const auto& v : f.samples) {
            CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("10 mW power is preserved sample by sample") {
        const auto f = field_from_phase(dfb(0.0, 10e-3), grid, zeros);
        for (const auto& v : f.samples)
            CHECK(std::norm(v) == doctest::Approx(0.01).epsilon(1e-12));
    }
    SUBCASE("80 MHz offset rotates with a 12.5 ns period") {
        const auto f = field_from_phase(dfb(0.0, 1.0, 80e6), grid, zeros);
        const double arg1 = std::arg(f.samples[1] * std::conj(f.samples[0]));
        CHECK(arg1 == doctest::Approx(kTwoPi * 80e6 * 1e-9).epsilon(1e-9));
        // two full turns after 25 samples (12.5 ns period)
        const double arg25 = std::arg(f.samples[25] * std::conj(f.samples[0]));
        CHECK(arg25 == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(f.nu_offset == 80e6);
    }
    SUBCASE("length mismatch is an error") {
        std::vector<double> bad(63, 0.0);
        CHECK_THROWS_AS(field_from_phase(dfb(0.0), grid, bad), SimError);
    }
}

TEST_CASE("linear drift ramps the instantaneous frequency") {
    // 3.6 GHz/hour = 1 MHz/s; over 2 ms the offset reaches 2 kHz
    LaserSpec s = dfb(0.0);
    s.drift.kind = DriftKind::linear;
    s.drift.rate_hz_per_hour = 3.6e9;
    const double dt = 1e-6;
    SimGrid grid{dt, 2001, 3};
    const auto phases = gen_phase_trajectory(s, grid);
    // instantaneous frequency estimate over the run
    const double slope_hz_per_s = 1e6;
    for (std::size_t k = 500; k < phases.size(); k += 500) {
        const double f_inst =
            (phases[k] - phases[k - 1]) / (kTwoPi * dt);
        const double expected = slope_hz_per_s * (static_cast<double>(k - 1) * dt);
        CHECK(f_inst == doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("random-walk drift variance grows like the configured rate") {
    LaserSpec s = dfb(0.0);
    s.drift.kind = DriftKind::random_walk;
    s.drift.rate_hz_per_hour = 100e6;
    const double dt = 1e-3;
    // frequency offset after t should be ~N(0, rate^2 * t/3600)
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 40; ++rep) {
        SimGrid g{dt, 1000, static_cast<std::uint64_t>(100 + rep)};
        const auto ph = gen_phase_trajectory(s, g);
        const double f_end = (ph[999] - ph[998]) / (kTwoPi * dt);
        acc += f_end * f_end;
        ++count;
    }
    const double t_end = 999.0 * dt;
    const double expected_var = 100e6 * 100e6 * t_end / 3600.0;
    const double ratio = (acc / count) / expected_var;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("spectral consistency: Lorentzian line of the configured width") {
    // 5 MHz line sampled at 0.2 ns over ~0.84 ms (linewidth*span >> 500)
    const double dnu = 5e6;
    const double dt = 0.2e-9;
    const std::int64_t n = 1 << 22;
    SimGrid grid{dt, n, 2024};
    const auto phases = gen_phase_trajectory(dfb(dnu), grid);

    // line shape of exp(i*phi) read off a 100 MHz reference carrier so the
    // one-sided PSD shows the full Lorentzian away from DC
    const double f0 = 100e6;
    std::vector<double> series(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < series.size(); ++k)
        series[k] =
            std::cos(kTwoPi * f0 * (static_cast<double>(k) * dt) + phases[k]);
    const Spectrum spec = welch_psd(series, dt, 16384);
    const double width = fwhm(spec);
    CHECK(width == doctest::Approx(dnu).epsilon(0.05));
    CHECK(peak_frequency(spec) == doctest::Approx(f0).epsilon(0.01));
}
