#include "homsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace homsim {

double analytic_pcoin(double tau, const HomModel& model) {
    model.validate();
    return model.baseline *
           (1.0 - model.visibility * std::exp(-model.gamma_rate * std::abs(tau)) *
                      std::cos(model.omega_diff * tau));
}

namespace {

/// Integral over [0, x], x >= 0, of exp(-g*t)*cos(w*t).
double envelope_integral(double x, double g, double w) {
    const double d = g * g + w * w;
    if (d == 0.0) return x;
    const double e = std::exp(-g * x);
    return (g - e * (g * std::cos(w * x) - w * std::sin(w * x))) / d;
}

} // namespace

double analytic_pcoin_bin(double tau_lo, double tau_hi, const HomModel& model) {
    model.validate();
    if (!(tau_hi > tau_lo)) throw SimError("analytic_pcoin_bin: empty interval");
    const double g = model.gamma_rate;
    const double w = model.omega_diff;
    // integrand is even in tau; split at zero if the bin straddles it
    double integral = 0.0;
    if (tau_lo >= 0.0) {
        integral = envelope_integral(tau_hi, g, w) - envelope_integral(tau_lo, g, w);
    } else if (tau_hi <= 0.0) {
        integral = envelope_integral(-tau_lo, g, w) - envelope_integral(-tau_hi, g, w);
    } else {
        integral = envelope_integral(-tau_lo, g, w) + envelope_integral(tau_hi, g, w);
    }
    const double width = tau_hi - tau_lo;
    return model.baseline * (1.0 - model.visibility * integral / width);
}

double gamma_from_linewidths(double dnu_a, double dnu_b) {
    if (!(dnu_a > 0.0) || !(dnu_b > 0.0))
        throw ConfigError("gamma_from_linewidths: linewidths must be > 0");
    return kPi * (dnu_a + dnu_b);
}

double fwhm(const Spectrum& spec) {
    const auto& p = spec.psd;
    if (p.size() < 8) throw SimError("fwhm: spectrum too short");
    // skip the DC region (window main lobe)
    const std::size_t lo = 3;
    std::vector<double> sorted(p.begin() + static_cast<std::ptrdiff_t>(lo), p.end());
    std::sort(sorted.begin(), sorted.end());
    const double floor = sorted[sorted.size() / 2];
    std::size_t pk = lo;
    for (std::size_t k = lo; k < p.size(); ++k)
        if (p[k] > p[pk]) pk = k;
    if (!(p[pk] > 3.0 * floor) || p[pk] <= 0.0)
        throw SimError("fwhm: no peak above 3x the median floor");
    const double half = 0.5 * p[pk];

    // first crossing below half scanning outward, linear interpolation
    double f_left = spec.freq_at(lo);
    for (std::size_t k = pk; k-- > lo;) {
        if (p[k] < half) {
            const double frac = (p[k + 1] - half) / (p[k + 1] - p[k]);
            f_left = spec.freq_at(k + 1) - frac * spec.df;
            break;
        }
    }
    double f_right = spec.freq_at(p.size() - 1);
    for (std::size_t k = pk + 1; k < p.size(); ++k) {
        if (p[k] < half) {
            const double frac = (p[k - 1] - half) / (p[k - 1] - p[k]);
            f_right = spec.freq_at(k - 1) + frac * spec.df;
            break;
        }
    }
    return f_right - f_left;
}

double peak_frequency(const Spectrum& spec) {
    const auto& p = spec.psd;
    if (p.size() < 8) throw SimError("peak_frequency: spectrum too short");
    std::size_t pk = 3;
    for (std::size_t k = 3; k < p.size(); ++k)
        if (p[k] > p[pk]) pk = k;
    if (pk == 0 || pk + 1 >= p.size()) return spec.freq_at(pk);
    const double denom = p[pk - 1] - 2.0 * p[pk] + p[pk + 1];
    double offset = 0.0;
    if (denom != 0.0) offset = 0.5 * (p[pk - 1] - p[pk + 1]) / denom;
    return spec.freq_at(pk) + offset * spec.df;
}

double visibility(const CoincidenceHistogram& hist, double gamma_hint) {
    if (!hist.valid || hist.normalized.empty())
        throw SimError("visibility: empty histogram");
    if (!(gamma_hint > 0.0))
        throw ConfigError("visibility: gamma_hint must be > 0");
    // baseline from the outer 25% of the range
    double base = 0.0;
    std::int64_t nb = 0;
    const double edge = 0.75 * hist.max_tau();
    for (std::int64_t i = 0; i < hist.n_bins(); ++i) {
        if (std::abs(hist.tau_center(i)) >= edge) {
            base += hist.normalized[static_cast<std::size_t>(i)];
            ++nb;
        }
    }
    base /= static_cast<double>(nb);
    if (!(base > 0.0)) throw SimError("visibility: zero baseline");
    const double central = std::min(3.0 / gamma_hint, hist.max_tau());
    double lowest = base;
    for (std::int64_t i = 0; i < hist.n_bins(); ++i) {
        if (std::abs(hist.tau_center(i)) <= central)
            lowest = std::min(lowest, hist.normalized[static_cast<std::size_t>(i)]);
    }
    return 1.0 - lowest / base;
}

FpScanTrace fp_scan(const std::vector<CavityLine>& lines, double fsr,
                    double finesse, double scan_range, std::size_t n_points) {
    if (!(fsr > 0.0)) throw ConfigError("fp_scan: fsr must be > 0");
    if (!(finesse > 1.0)) throw ConfigError("fp_scan: finesse must be > 1");
    if (!(scan_range > 0.0)) throw ConfigError("fp_scan: scan_range must be > 0");
    if (n_points < 2) throw ConfigError("fp_scan: n_points must be >= 2");
    const double cavity_fwhm = fsr / finesse;
    FpScanTrace trace;
    trace.freqs.resize(n_points);
    trace.transmission.assign(n_points, 0.0);
    const double lo = -0.5 * scan_range;
    const double step = scan_range / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i)
        trace.freqs[i] = lo + step * static_cast<double>(i);
    for (const auto& line : lines) {
        const double width = cavity_fwhm + line.linewidth;
        const double hw = 0.5 * width;
        // cavity orders whose peak can contribute inside the scan window
        const double reach = 0.5 * scan_range + 20.0 * width;
        const auto k_lo = static_cast<std::int64_t>(
            std::floor((-reach - line.nu_offset) / fsr));
        const auto k_hi = static_cast<std::int64_t>(
            std::ceil((reach - line.nu_offset) / fsr));
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const double center = line.nu_offset + static_cast<double>(k) * fsr;
            for (std::size_t i = 0; i < n_points; ++i) {
                const double d = trace.freqs[i] - center;
                trace.transmission[i] +=
                    line.power * hw * hw / (d * d + hw * hw);
            }
        }
    }
    return trace;
}

std::vector<double> scan_peaks(const FpScanTrace& trace, std::size_t n) {
    const auto& y = trace.transmission;
    std::vector<std::pair<double, std::size_t>> maxima; // (height, index)
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) maxima.emplace_back(y[i], i);
    std::sort(maxima.rbegin(), maxima.rend());
    if (maxima.size() > n) maxima.resize(n);
    std::vector<double> centers;
    centers.reserve(maxima.size());
    const double step = trace.freqs[1] - trace.freqs[0];
    for (const auto& m : maxima) {
        const std::size_t i = m.second;
        const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double offset = 0.0;
        if (denom != 0.0) offset = 0.5 * (y[i - 1] - y[i + 1]) / denom;
        centers.push_back(trace.freqs[i] + offset * step);
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

} // namespace homsim
