#include <algorithm>
#include <array>
#include <cmath>

#include "homsim/analysis.hpp"

namespace homsim {

namespace {

constexpr int kNParams = 4; // V, gamma, omega, baseline
constexpr int kMaxIterations = 200;

struct Bounds {
    std::array<double, kNParams> lo;
    std::array<double, kNParams> hi;
    void clamp(std::array<double, kNParams>& p) const {
        for (int i = 0; i < kNParams; ++i)
            p[i] = std::min(hi[i], std::max(lo[i], p[i]));
    }
};

struct FitData {
    std::vector<double> tau_lo, tau_hi, value, sigma;
};

HomModel to_model(const std::array<double, kNParams>& p) {
    HomModel m;
    m.visibility = p[0];
    m.gamma_rate = p[1];
    m.omega_diff = p[2];
    m.baseline = p[3];
    return m;
}

void residuals(const FitData& d, const std::array<double, kNParams>& p,
               std::vector<double>& r) {
    const HomModel m = to_model(p);
    r.resize(d.value.size());
    for (std::size_t i = 0; i < d.value.size(); ++i)
        r[i] = (d.value[i] - analytic_pcoin_bin(d.tau_lo[i], d.tau_hi[i], m)) /
               d.sigma[i];
}

double cost(const std::vector<double>& r) {
    double c = 0.0;
    for (double v : r) c += v * v;
    return c;
}

/// Solves the symmetric positive-definite 4x4 system A x = b by Cholesky.
/// Returns false if the factorization breaks down.
bool solve_spd(std::array<std::array<double, kNParams>, kNParams> a,
               std::array<double, kNParams> b,
               std::array<double, kNParams>& x) {
    std::array<std::array<double, kNParams>, kNParams> l{};
    for (int i = 0; i < kNParams; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    std::array<double, kNParams> y{};
    for (int i = 0; i < kNParams; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    for (int i = kNParams - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < kNParams; ++k) s -= l[k][i] * x[k];
        x[i] = s / l[i][i];
    }
    return true;
}

void jacobian(const FitData& d, const std::array<double, kNParams>& p,
              const Bounds& bounds, const std::vector<double>& r0,
              std::vector<std::array<double, kNParams>>& jac) {
    jac.resize(r0.size());
    std::vector<double> r1;
    for (int j = 0; j < kNParams; ++j) {
        const double scale = std::max(std::abs(p[j]), 1e-3 * (bounds.hi[j] - bounds.lo[j]));
        double h = 1e-6 * scale;
        auto pj = p;
        if (pj[j] + h > bounds.hi[j]) h = -h;
        pj[j] += h;
        residuals(d, pj, r1);
        for (std::size_t i = 0; i < r0.size(); ++i)
            jac[i][j] = (r1[i] - r0[i]) / h;
    }
}

} // namespace

HomFitResult fit_hom(const CoincidenceHistogram& hist) {
    if (!hist.valid) throw SimError("fit_hom: empty histogram");
    if (hist.n_bins() < 50) throw SimError("fit_hom: need at least 50 bins");
    if (!(hist.baseline_mean > 0.0)) throw SimError("fit_hom: zero baseline");

    FitData d;
    const auto n = static_cast<std::size_t>(hist.n_bins());
    d.tau_lo.resize(n);
    d.tau_hi.resize(n);
    d.value.resize(n);
    d.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = hist.tau_center(static_cast<std::int64_t>(i));
        d.tau_lo[i] = c - 0.5 * hist.bin_width;
        d.tau_hi[i] = c + 0.5 * hist.bin_width;
        d.value[i] = hist.normalized[i];
        d.sigma[i] = std::max(hist.sigma(static_cast<std::int64_t>(i)), 1e-12);
    }

    // -- initialization --------------------------------------------------
    // baseline from the outer quarter of the range
    double base0 = 0.0;
    std::size_t nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(hist.tau_center(static_cast<std::int64_t>(i))) >=
            0.75 * hist.max_tau()) {
            base0 += d.value[i];
            ++nb;
        }
    }
    base0 /= static_cast<double>(nb);

    // omega from the dominant discrete-frequency component of (1 - value)
    const std::size_t k_center = n / 2;
    double best_amp = 0.0;
    double omega0 = 0.0;
    const double nyquist = kPi / hist.bin_width; // rad/s
    const std::size_t n_freq = n / 2;
    for (std::size_t m = 1; m < n_freq; ++m) {
        const double w = nyquist * static_cast<double>(m) / static_cast<double>(n_freq);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = hist.tau_center(static_cast<std::int64_t>(i));
            const double dev = base0 - d.value[i];
            re += dev * std::cos(w * t);
            im += dev * std::sin(w * t);
        }
        const double amp = re * re + im * im;
        if (amp > best_amp) {
            best_amp = amp;
            omega0 = w;
        }
    }
    double v0 = 1.0 - d.value[k_center] / base0;
    v0 = std::min(0.6, std::max(0.01, v0));
    // keep the scanned omega only if the fringe actually rises above baseline
    // at the half period; a plain dip fits best starting from omega = 0
    if (omega0 > 0.0) {
        const auto probe =
            k_center +
            static_cast<std::size_t>(std::llround(kPi / omega0 / hist.bin_width));
        if (!(probe < n && d.value[probe] > base0 * (1.0 + 0.1 * v0)))
            omega0 = 0.0;
    }

    Bounds bounds{{0.0, 1e4, 0.0, 0.1 * base0},
                  {0.6, 1e10, kPi / hist.bin_width, 10.0 * base0}};
    std::array<double, kNParams> p{v0, kPi * 1e7, omega0, base0};
    bounds.clamp(p);

    // -- Levenberg-Marquardt with box projection ---------------------------
    std::vector<double> r, r_try;
    residuals(d, p, r);
    double c = cost(r);
    double lambda = 1e-3;
    int iter = 0;
    bool small_step = false;
    std::vector<std::array<double, kNParams>> jac;
    for (; iter < kMaxIterations; ++iter) {
        jacobian(d, p, bounds, r, jac);
        std::array<std::array<double, kNParams>, kNParams> jtj{};
        std::array<double, kNParams> jtr{};
        for (std::size_t i = 0; i < r.size(); ++i) {
            for (int a = 0; a < kNParams; ++a) {
                jtr[a] += jac[i][a] * r[i];
                for (int b = a; b < kNParams; ++b)
                    jtj[a][b] += jac[i][a] * jac[i][b];
            }
        }
        for (int a = 0; a < kNParams; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            auto damped = jtj;
            for (int a = 0; a < kNParams; ++a)
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-30);
            std::array<double, kNParams> step{};
            if (solve_spd(damped, jtr, step)) {
                auto p_try = p;
                for (int a = 0; a < kNParams; ++a) p_try[a] += step[a];
                bounds.clamp(p_try);
                residuals(d, p_try, r_try);
                const double c_try = cost(r_try);
                if (c_try < c) {
                    double rel_step = 0.0;
                    for (int a = 0; a < kNParams; ++a)
                        rel_step = std::max(
                            rel_step, std::abs(p_try[a] - p[a]) /
                                          std::max(std::abs(p[a]), 1e-30));
                    const double rel_drop = (c - c_try) / std::max(c, 1e-300);
                    p = p_try;
                    r = r_try;
                    c = c_try;
                    improved = true;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    if (rel_drop < 1e-10 || rel_step < 1e-9) small_step = true;
                }
            }
            if (!improved) lambda *= 10.0;
        }
        if (!improved || small_step) break;
    }

    HomFitResult result;
    result.model = to_model(p);
    result.iterations = iter + 1;

    // raw residual RMS in normalized units and mean statistical error
    double rms = 0.0, msig = 0.0;
    const HomModel m = result.model;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = d.value[i] - analytic_pcoin_bin(d.tau_lo[i], d.tau_hi[i], m);
        rms += e * e;
        msig += d.sigma[i];
    }
    result.residual_rms = std::sqrt(rms / static_cast<double>(n));
    result.mean_bin_sigma = msig / static_cast<double>(n);
    result.converged = iter < kMaxIterations &&
                       result.residual_rms < 5.0 * result.mean_bin_sigma;

    // standard errors from the whitened normal matrix at the solution
    jacobian(d, p, bounds, r, jac);
    std::array<std::array<double, kNParams>, kNParams> jtj{};
    for (std::size_t i = 0; i < r.size(); ++i)
        for (int a = 0; a < kNParams; ++a)
            for (int b = a; b < kNParams; ++b)
                jtj[a][b] += jac[i][a] * jac[i][b];
    for (int a = 0; a < kNParams; ++a)
        for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];
    // invert via Cholesky solves against unit vectors
    for (int a = 0; a < kNParams; ++a) {
        std::array<double, kNParams> e{}, col{};
        e[a] = 1.0;
        if (solve_spd(jtj, e, col) && col[a] > 0.0)
            result.std_error[a] = std::sqrt(col[a]);
        else
            result.std_error[a] = 0.0;
    }
    return result;
}

} // namespace homsim
