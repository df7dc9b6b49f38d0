#include "homsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "homsim/analysis.hpp"
#include "homsim/channel.hpp"
#include "homsim/detect.hpp"
#include "homsim/injection.hpp"
#include "homsim/phasenoise.hpp"

namespace homsim {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

/// CSV sink with IoError reporting and "%.6e" numeric formatting.
class CsvFile {
public:
    CsvFile(const fs::path& path, const std::string& header) {
        f_ = std::fopen(path.string().c_str(), "wb");
        if (!f_) throw IoError("cannot open '" + path.string() + "' for writing");
        row_text(header);
    }
    ~CsvFile() {
        if (f_) std::fclose(f_);
    }
    CsvFile(const CsvFile&) = delete;
    CsvFile& operator=(const CsvFile&) = delete;

    void row_text(const std::string& line) {
        if (std::fputs(line.c_str(), f_) < 0 || std::fputc('\n', f_) < 0)
            throw IoError("write failure");
    }

    template <typename... Ts>
    void row(Ts... vs) {
        std::string line;
        bool first = true;
        auto add = [&](auto v) {
            if (!first) line += ',';
            first = false;
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                line += fmt(v);
            else if constexpr (std::is_integral_v<T>)
                line += std::to_string(v);
            else
                line += v;
        };
        (add(vs), ...);
        row_text(line);
    }

private:
    std::FILE* f_ = nullptr;
};

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int nt = threads > 0 ? threads : hw;
    nt = static_cast<int>(std::min<std::int64_t>(nt, n));
    if (nt <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Fixed-length delay line for streamed scalar series.
class DelayLine {
public:
    explicit DelayLine(std::int64_t delay_samples)
        : buf_(static_cast<std::size_t>(std::max<std::int64_t>(delay_samples, 0)),
               0.0),
          delay_(delay_samples) {}

    /// Pushes the newest value; returns the value delayed by the line length,
    /// valid once `count() > delay()`.
    double push(double v) {
        if (delay_ == 0) return v;
        const double out = buf_[head_];
        buf_[head_] = v;
        head_ = (head_ + 1) % buf_.size();
        ++count_;
        return out;
    }

    std::int64_t delay() const { return delay_; }
    bool primed() const { return delay_ == 0 || count_ >= static_cast<std::size_t>(delay_); }

private:
    std::vector<double> buf_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    std::int64_t delay_ = 0;
};

LaserSpec laser_from_config(const ScenarioConfig& cfg, const std::string& who,
                            double nu_offset, double linewidth_scale = 1.0) {
    LaserSpec s;
    s.nu_offset = nu_offset;
    s.linewidth_fwhm = cfg.number(who + ".linewidth") * linewidth_scale;
    s.power = cfg.number(who + ".power");
    const std::string& kind = cfg.word(who + ".drift");
    s.drift.kind = kind == "linear"
                       ? DriftKind::linear
                       : (kind == "random-walk" ? DriftKind::random_walk
                                                : DriftKind::none);
    s.drift.rate_hz_per_hour = cfg.number(who + ".drift_rate");
    return s;
}

FiberSpec fiber_from_config(const ScenarioConfig& cfg, const std::string& who) {
    FiberSpec f;
    f.length_km = cfg.number(who + ".length") / 1e3; // stored in meters
    f.attenuation_db_per_km = cfg.number(who + ".attenuation");
    f.group_index = cfg.number(who + ".group_index");
    f.validate();
    return f;
}

double resolve_kappa_coeff(const ScenarioConfig& cfg) {
    const double k = cfg.number("oil.kappa_coeff");
    if (k > 0.0) return k;
    return calibrate_kappa({{cfg.number("oil.anchor_injection_power"),
                             cfg.number("oil.anchor_slave_power"),
                             cfg.number("oil.anchor_bandwidth")}});
}

InjectionConfig injection_from_config(const ScenarioConfig& cfg,
                                      double slave_detuning,
                                      double linewidth_scale = 1.0) {
    InjectionConfig ic;
    ic.injection_power = cfg.number("oil.injection_power");
    ic.slave_power = cfg.number("bob.power");
    ic.kappa_coeff = resolve_kappa_coeff(cfg);
    ic.slave = laser_from_config(cfg, "bob", slave_detuning, linewidth_scale);
    ic.slave_noise_factor = cfg.number("oil.slave_noise_factor");
    return ic;
}

double capped_delay(const ScenarioConfig& cfg, const FiberSpec& fiber) {
    const double cap = cfg.number("channel.delay_cap");
    const double d = fiber.delay_s();
    return cap > 0.0 ? std::min(d, cap) : d;
}

struct Metrics {
    std::vector<std::pair<std::string, std::string>> rows;
    void add(const std::string& key, double v) { rows.emplace_back(key, fmt(v)); }
    void add_int(const std::string& key, std::int64_t v) {
        rows.emplace_back(key, fmt_int(v));
    }
    void add_text(const std::string& key, const std::string& v) {
        rows.emplace_back(key, v);
    }
};

void write_histogram_csv(const fs::path& path, const CoincidenceHistogram& h) {
    CsvFile csv(path, "tau_s,raw_count,normalized");
    for (std::int64_t i = 0; i < h.n_bins(); ++i)
        csv.row(h.tau_center(i),
                static_cast<double>(h.raw[static_cast<std::size_t>(i)]),
                h.normalized[static_cast<std::size_t>(i)]);
}

void write_fit_csv(const fs::path& path, const HomFitResult& fit) {
    CsvFile csv(path, "parameter,value,std_error");
    csv.row("visibility", fit.model.visibility, fit.std_error[0]);
    csv.row("gamma_rate", fit.model.gamma_rate, fit.std_error[1]);
    csv.row("omega_diff", fit.model.omega_diff, fit.std_error[2]);
    csv.row("baseline", fit.model.baseline, fit.std_error[3]);
    csv.row("residual_rms", fit.residual_rms, 0.0);
    csv.row("converged", static_cast<std::int64_t>(fit.converged ? 1 : 0), 0.0);
}

void write_spectrum_csv(const fs::path& path, const Spectrum& s) {
    CsvFile csv(path, "freq_hz,psd");
    for (std::size_t k = 0; k < s.psd.size(); ++k)
        csv.row(s.freq_at(k), s.psd[k]);
}

void write_fp_csv(const fs::path& path, const FpScanTrace& t) {
    CsvFile csv(path, "freq_hz,transmission");
    for (std::size_t i = 0; i < t.freqs.size(); ++i)
        csv.row(t.freqs[i], t.transmission[i]);
}

// ---------------------------------------------------------------------------
// hom-locked / hom-unlocked
// ---------------------------------------------------------------------------

struct HomSetup {
    bool locked = false;
    double dnu_a = 0.0, dnu_b = 0.0;
    double detuning = 0.0;
    double pol_overlap = 1.0;
    double arm_ratio = 1.0;
    double gamma_cfg = 0.0;       // pi*(dnu_a+dnu_b)
    double kappa = 0.0;
    double det_dt = 0.0;
    int decimation = 1;           // fine steps per detection sample
    double fine_dt = 0.0;
    std::int64_t oil_delay_fine = 0;
    std::int64_t bc_delay_det = 0;
    std::int64_t ac_delay_det = 0;
    double pa_bs = 0.0, pb_bs = 0.0; // arm powers at the beam splitter [W]
    DetectorSpec det;
    double rate_per_watt = 0.0;
    double bin = 0.0;
    double max_tau = 0.0;
    std::int64_t trials = 0;
    std::int64_t det_samples_per_trial = 0;
    std::int64_t warmup_det_samples = 0;
    double expected_visibility = 0.0;
    double omega_expected = 0.0;
    InjectionConfig icfg;
    LaserSpec alice;
};

HomSetup resolve_hom(const ScenarioConfig& cfg, bool locked) {
    HomSetup s;
    s.locked = locked;
    s.dnu_a = cfg.number("alice.linewidth");
    s.dnu_b = cfg.number("bob.linewidth");
    s.detuning = cfg.number("bob.detuning");
    s.pol_overlap = cfg.number("charlie.pol_overlap");
    s.arm_ratio = cfg.number("charlie.arm_ratio");
    s.gamma_cfg = gamma_from_linewidths(s.dnu_a, s.dnu_b);
    s.alice = laser_from_config(cfg, "alice", 0.0);
    s.icfg = injection_from_config(cfg, s.detuning);
    s.kappa = locked ? locking_bandwidth(s.icfg) : 0.0;

    s.bin = cfg.number("hist.bin");
    s.max_tau = cfg.number("hist.max_tau");
    if (s.max_tau <= 0.0) {
        const double want = 24.0 / s.gamma_cfg;
        s.max_tau = std::max(50e-9, std::ceil(want / s.bin) * s.bin);
    }

    // detection grid: resolve the analysis bin and the fastest intensity beat
    const double beat = locked ? 0.0 : std::abs(s.detuning);
    const double rule_det =
        1.0 / (50.0 * std::max({s.dnu_a, s.dnu_b, beat, 1.0}));
    double det_dt = cfg.number("grid.det_dt");
    if (det_dt <= 0.0)
        det_dt = s.bin / std::max(2.0, std::ceil(s.bin / rule_det));
    s.det_dt = det_dt;

    // integration grid for the injection dynamics
    if (locked) {
        const double rule_fine =
            std::min(det_dt, 0.02 / std::max(s.kappa, std::abs(s.detuning)));
        s.decimation = static_cast<int>(std::ceil(det_dt / rule_fine));
        s.fine_dt = det_dt / s.decimation;
    } else {
        s.decimation = 1;
        s.fine_dt = det_dt;
    }

    const FiberSpec oil = fiber_from_config(cfg, "oil");
    const FiberSpec bc = fiber_from_config(cfg, "bc");
    const FiberSpec ac = fiber_from_config(cfg, "ac");
    s.oil_delay_fine = static_cast<std::int64_t>(
        std::llround(capped_delay(cfg, oil) / s.fine_dt));
    s.bc_delay_det =
        static_cast<std::int64_t>(std::llround(capped_delay(cfg, bc) / det_dt));
    s.ac_delay_det =
        static_cast<std::int64_t>(std::llround(capped_delay(cfg, ac) / det_dt));

    // powers at the beam splitter: Bob arrives through the 50 km link; the
    // Alice arm is balanced to arm_ratio * Pb with her local attenuator
    const double bc_power_factor = std::pow(10.0, -bc.loss_db() / 10.0);
    s.pb_bs = cfg.number("bob.power") * bc_power_factor;
    s.pa_bs = s.arm_ratio * s.pb_bs;

    s.det.efficiency = cfg.number("det.efficiency");
    s.det.dark_rate = cfg.number("det.dark_rate");
    s.det.dead_time = cfg.number("det.dead_time");
    s.det.jitter_sigma = cfg.number("det.jitter");
    s.det.validate();
    s.rate_per_watt = cfg.number("det.rate_per_watt");

    // accumulation sizing from the coincidence-pair budget
    const double mean_intensity = 0.5 * (s.pa_bs + s.pb_bs);
    const double r_raw =
        s.det.efficiency * s.rate_per_watt * mean_intensity + s.det.dark_rate;
    if (r_raw * s.det_dt > 0.1)
        throw ConfigError("hom scenario: rate*dt > 0.1; lower det.rate_per_watt");
    const double r_eff = r_raw / (1.0 + r_raw * s.det.dead_time);
    const double window = 2.0 * s.max_tau + s.bin;
    const double pairs_per_s = r_eff * r_eff * window;
    const double target = cfg.number("target_pairs");
    double t_use = target / pairs_per_s;
    t_use = std::max(t_use, 50.0 / s.gamma_cfg);

    s.trials = cfg.integer("trials") > 0 ? cfg.integer("trials") : 16;
    double span_per_trial = cfg.number("grid.span");
    if (span_per_trial <= 0.0)
        span_per_trial =
            std::max(t_use / static_cast<double>(s.trials), 100.0 / s.gamma_cfg);

    const double warmup =
        static_cast<double>(s.oil_delay_fine) * s.fine_dt +
        static_cast<double>(std::max(s.bc_delay_det, s.ac_delay_det)) * s.det_dt +
        1e-6;
    s.warmup_det_samples = static_cast<std::int64_t>(std::ceil(warmup / det_dt));
    s.det_samples_per_trial =
        s.warmup_det_samples +
        static_cast<std::int64_t>(std::ceil(span_per_trial / det_dt));

    const double balance = 2.0 * std::sqrt(s.arm_ratio) / (1.0 + s.arm_ratio);
    s.expected_visibility =
        0.5 * s.pol_overlap * s.pol_overlap * balance;
    s.omega_expected = locked ? 0.0 : kTwoPi * std::abs(s.detuning);
    return s;
}

struct HomTrialOut {
    CoincidenceHistogram hist;
    std::int64_t clicks_a = 0;
    std::int64_t clicks_b = 0;
    double mean_freq_error = 0.0;
    bool locked = false;
    double counted_span = 0.0;
};

HomTrialOut run_hom_trial(const HomSetup& s, std::uint64_t seed,
                          std::int64_t trial) {
    HomTrialOut out;
    out.hist = make_histogram(s.bin, s.max_tau);

    const auto tr = static_cast<std::uint64_t>(trial);
    WienerPhaseSource master(s.alice, s.fine_dt,
                             substream_seed(seed, tr, StreamTag::master_phase));
    DelayLine oil_line(s.oil_delay_fine);
    DelayLine bc_line(s.bc_delay_det);
    DelayLine ac_line(s.ac_delay_det);

    std::optional<AdlerStepper> slave;
    std::optional<WienerPhaseSource> bob_free;
    if (s.locked)
        slave.emplace(s.icfg, 0.0, s.fine_dt,
                      substream_seed(seed, tr, StreamTag::slave_noise));
    else
        bob_free.emplace(s.icfg.slave, s.fine_dt,
                         substream_seed(seed, tr, StreamTag::bob_phase));

    ClickGenerator gen_a(s.det, s.rate_per_watt, s.det_dt,
                         substream_seed(seed, tr, StreamTag::detector_a));
    ClickGenerator gen_b(s.det, s.rate_per_watt, s.det_dt,
                         substream_seed(seed, tr, StreamTag::detector_b));

    const double coh = s.pol_overlap * std::sqrt(s.pa_bs * s.pb_bs);
    const double mean_i = 0.5 * (s.pa_bs + s.pb_bs);
    const double w_bob = kTwoPi * s.detuning; // free-running carrier offset

    constexpr std::int64_t kChunk = 16384;
    std::vector<double> i1(kChunk), i2(kChunk);
    std::int64_t chunk_fill = 0;
    double chunk_t0 = 0.0;

    // slave mean-frequency bookkeeping over the final 80% of the counted span
    const std::int64_t n_det = s.det_samples_per_trial;
    const std::int64_t fine_per_det = s.decimation;
    const std::int64_t k80 =
        s.warmup_det_samples +
        (n_det - s.warmup_det_samples) / 5;  // start of the final 80%
    double psi80 = 0.0, psi_end = 0.0;

    std::int64_t k_fine = 0;
    for (std::int64_t j = 0; j < n_det; ++j) {
        double master_phase = 0.0;
        double bob_phase = 0.0;
        for (std::int64_t q = 0; q < fine_per_det; ++q) {
            master_phase = master.next();
            const double injected = oil_line.push(master_phase);
            if (s.locked) {
                bob_phase = slave->step(oil_line.primed()
                                            ? std::polar(1.0, injected)
                                            : std::complex<double>{0.0, 0.0});
            } else {
                // total baseband phase includes the detuning carrier
                bob_phase = bob_free->next() +
                            w_bob * (static_cast<double>(k_fine) * s.fine_dt);
            }
            ++k_fine;
        }
        const double alice_at_c = ac_line.push(master_phase);
        const double bob_at_c = bc_line.push(bob_phase);
        if (j == k80) psi80 = bob_phase;
        if (j == n_det - 1) psi_end = bob_phase;
        if (j < s.warmup_det_samples) continue;
        if (!ac_line.primed() || !bc_line.primed()) continue;
        if (chunk_fill == 0)
            chunk_t0 = static_cast<double>(j) * s.det_dt;
        const double c = std::cos(alice_at_c - bob_at_c);
        i1[static_cast<std::size_t>(chunk_fill)] = mean_i + coh * c;
        i2[static_cast<std::size_t>(chunk_fill)] = mean_i - coh * c;
        ++chunk_fill;
        if (chunk_fill == kChunk) {
            gen_a.feed({i1.data(), static_cast<std::size_t>(chunk_fill)}, chunk_t0);
            gen_b.feed({i2.data(), static_cast<std::size_t>(chunk_fill)}, chunk_t0);
            chunk_fill = 0;
        }
    }
    if (chunk_fill > 0) {
        gen_a.feed({i1.data(), static_cast<std::size_t>(chunk_fill)}, chunk_t0);
        gen_b.feed({i2.data(), static_cast<std::size_t>(chunk_fill)}, chunk_t0);
    }

    const double span = static_cast<double>(n_det) * s.det_dt;
    ClickStream sa = gen_a.finalize(span);
    ClickStream sb = gen_b.finalize(span);
    out.clicks_a = static_cast<std::int64_t>(sa.timestamps.size());
    out.clicks_b = static_cast<std::int64_t>(sb.timestamps.size());
    accumulate_pairs(sa, sb, out.hist);
    out.counted_span =
        static_cast<double>(n_det - s.warmup_det_samples) * s.det_dt;
    out.hist.accumulation_time = out.counted_span;

    if (s.locked) {
        const double t80 = static_cast<double>(n_det - 1 - k80) * s.det_dt;
        out.mean_freq_error = (psi_end - psi80) / (kTwoPi * t80);
        out.locked = std::abs(out.mean_freq_error) <= 0.01 * s.kappa;
    }
    return out;
}

RunSummary run_hom(const ScenarioConfig& cfg, const fs::path& out, bool locked) {
    const HomSetup s = resolve_hom(cfg, locked);
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));

    std::vector<HomTrialOut> results(static_cast<std::size_t>(s.trials));
    parallel_for(s.trials, static_cast<int>(cfg.integer("threads")),
                 [&](std::int64_t t) {
                     results[static_cast<std::size_t>(t)] =
                         run_hom_trial(s, seed, t);
                 });

    CoincidenceHistogram hist = make_histogram(s.bin, s.max_tau);
    std::int64_t clicks_a = 0, clicks_b = 0, locked_trials = 0;
    double mean_err = 0.0;
    for (const auto& r : results) {
        hist.merge(r.hist);
        clicks_a += r.clicks_a;
        clicks_b += r.clicks_b;
        locked_trials += r.locked ? 1 : 0;
        mean_err += r.mean_freq_error;
    }
    mean_err /= static_cast<double>(s.trials);
    hist.normalize();

    const HomFitResult fit = fit_hom(hist);
    const double vis_direct = visibility(hist, s.gamma_cfg);

    std::int64_t pairs = 0;
    for (auto r : hist.raw) pairs += r;

    RunSummary summary;
    summary.scenario = locked ? "hom-locked" : "hom-unlocked";
    Metrics m;
    m.add_int("pairs_total", pairs);
    m.add_int("clicks_a", clicks_a);
    m.add_int("clicks_b", clicks_b);
    m.add("accumulation_time_s", hist.accumulation_time);
    m.add("visibility_fit", fit.model.visibility);
    m.add("visibility_fit_err", fit.std_error[0]);
    m.add("visibility_direct", vis_direct);
    m.add("gamma_rate_fit", fit.model.gamma_rate);
    m.add("gamma_rate_fit_err", fit.std_error[1]);
    m.add("omega_diff_fit_hz", fit.model.omega_diff / kTwoPi);
    m.add("omega_diff_fit_err_hz", fit.std_error[2] / kTwoPi);
    m.add("baseline_fit", fit.model.baseline);
    m.add_int("fit_converged", fit.converged ? 1 : 0);
    m.add("fit_residual_rms", fit.residual_rms);
    m.add("expected_visibility", s.expected_visibility);
    m.add("gamma_rate_config", s.gamma_cfg);
    m.add("omega_diff_config_hz", s.omega_expected / kTwoPi);
    if (locked) {
        m.add("locking_bandwidth_hz", s.kappa);
        m.add("mean_freq_error_hz", mean_err);
        m.add_int("locked", locked_trials == s.trials ? 1 : 0);
    }
    summary.metrics = m.rows;

    write_histogram_csv(out / "histogram.csv", hist);
    write_fit_csv(out / "fit.csv", fit);
    summary.artifacts = {"histogram.csv", "fit.csv"};
    return summary;
}

// ---------------------------------------------------------------------------
// beat
// ---------------------------------------------------------------------------

RunSummary run_beat(const ScenarioConfig& cfg, const fs::path& out) {
    const double noise_scale = cfg.number("beat.noise_scale");
    const double dnu_a = cfg.number("alice.linewidth") * noise_scale;
    const double dnu_b = cfg.number("bob.linewidth") * noise_scale;
    const double detuning = cfg.number("bob.detuning");
    const double aom = cfg.number("aom.shift");
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));

    LaserSpec alice = laser_from_config(cfg, "alice", 0.0);
    alice.linewidth_fwhm = dnu_a;
    InjectionConfig icfg = injection_from_config(cfg, detuning, noise_scale);
    const double kappa = locking_bandwidth(icfg);

    // sampling: resolve the shifted beat line; integrate the lock at fine dt
    const double f_interest = std::abs(aom) + std::abs(detuning) / 4.0 +
                              10.0 * (dnu_a + dnu_b);
    double det_dt = cfg.number("grid.det_dt");
    if (det_dt <= 0.0) det_dt = std::min(0.4e-9, 0.25 / f_interest);
    const double rule_fine = std::min(det_dt, 0.02 / std::max(kappa, std::abs(detuning)));
    const auto decim = static_cast<std::int64_t>(std::ceil(det_dt / rule_fine));
    const double fine_dt = det_dt / static_cast<double>(decim);

    const FiberSpec oil = fiber_from_config(cfg, "oil");
    const auto oil_delay_fine =
        static_cast<std::int64_t>(std::llround(capped_delay(cfg, oil) / fine_dt));

    const double span = cfg.number("beat.span");
    const double warmup =
        static_cast<double>(oil_delay_fine) * fine_dt + 2e-7;
    const auto n_det =
        static_cast<std::int64_t>(std::ceil((span + warmup) / det_dt));
    const auto warm_det = static_cast<std::int64_t>(std::ceil(warmup / det_dt));

    WienerPhaseSource master(alice, fine_dt,
                             substream_seed(seed, 0, StreamTag::master_phase));
    DelayLine oil_line(oil_delay_fine);
    AdlerStepper slave(icfg, 0.0, fine_dt,
                       substream_seed(seed, 0, StreamTag::slave_noise));

    std::vector<double> current;
    current.reserve(static_cast<std::size_t>(n_det - warm_det));
    const double pa = 1.0, pb = 1.0; // photocurrent shape is power-independent
    const double w_aom = kTwoPi * aom;

    const std::int64_t k80 = warm_det + (n_det - warm_det) / 5;
    double psi80 = 0.0, psi_end = 0.0;
    for (std::int64_t j = 0; j < n_det; ++j) {
        double mp = 0.0, sp = 0.0;
        for (std::int64_t q = 0; q < decim; ++q) {
            mp = master.next();
            const double injected = oil_line.push(mp);
            sp = slave.step(oil_line.primed() ? std::polar(1.0, injected)
                                              : std::complex<double>{0.0, 0.0});
        }
        if (j == k80) psi80 = sp;
        if (j == n_det - 1) psi_end = sp;
        if (j < warm_det) continue;
        const double t = static_cast<double>(j) * det_dt;
        current.push_back(pa + pb +
                          2.0 * std::sqrt(pa * pb) *
                              std::cos(w_aom * t + mp - sp));
    }

    const auto seg = static_cast<std::size_t>(cfg.integer("psd.segment"));
    const Spectrum spec = welch_psd(current, det_dt, seg, 256);
    const double center = peak_frequency(spec);
    const double width = fwhm(spec);
    const double expected = noise_scale * (cfg.number("alice.linewidth") +
                                           cfg.number("bob.linewidth"));

    const double t80 = static_cast<double>(n_det - 1 - k80) * det_dt;
    const double mean_freq_error = (psi_end - psi80) / (kTwoPi * t80);
    const bool locked = std::abs(mean_freq_error) <= 0.01 * kappa;

    RunSummary summary;
    summary.scenario = "beat";
    Metrics m;
    m.add("beat_center_hz", center);
    m.add("beat_fwhm_hz", width);
    m.add("beat_fwhm_expected_hz", expected);
    m.add("resolution_bw_hz", spec.resolution_bw);
    m.add("psd_df_hz", spec.df);
    m.add("aom_shift_hz", aom);
    m.add("locking_bandwidth_hz", kappa);
    m.add("mean_freq_error_hz", mean_freq_error);
    m.add_int("locked", locked ? 1 : 0);
    summary.metrics = m.rows;

    write_spectrum_csv(out / "spectrum.csv", spec);
    summary.artifacts = {"spectrum.csv"};
    return summary;
}

// ---------------------------------------------------------------------------
// lockband
// ---------------------------------------------------------------------------

LockReport lock_at(const InjectionConfig& icfg, double window,
                   std::uint64_t seed) {
    const double kappa = locking_bandwidth(icfg);
    const double fast =
        std::max({kappa, std::abs(icfg.slave.nu_offset), 1e6});
    const double dt = 0.02 / fast;
    SimGrid grid{dt, static_cast<std::int64_t>(std::ceil(window / dt)), seed};

    FieldTrajectory master;
    master.grid = grid;
    master.nu_offset = 0.0;
    master.samples.assign(static_cast<std::size_t>(grid.n_samples),
                          {std::sqrt(icfg.injection_power), 0.0});
    return simulate_slave(master, icfg, grid).second;
}

RunSummary run_lockband(const ScenarioConfig& cfg, const fs::path& out) {
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    const double kappa_coeff = resolve_kappa_coeff(cfg);
    const double window = cfg.number("lockband.window");
    const double step = cfg.number("lockband.step");
    const double slave_power = cfg.number("bob.power");

    auto noise_free_cfg = [&](double power, double detuning) {
        InjectionConfig ic;
        ic.injection_power = power;
        ic.slave_power = slave_power;
        ic.kappa_coeff = kappa_coeff;
        ic.slave = laser_from_config(cfg, "bob", detuning);
        ic.slave.linewidth_fwhm = 0.0;
        ic.slave_noise_factor = 0.0;
        return ic;
    };

    // detuning sweep at the configured power
    const double power = cfg.number("lockband.power");
    const double kappa = kappa_coeff * std::sqrt(power / slave_power);
    double max_det = cfg.number("lockband.max_detuning");
    if (max_det <= 0.0) max_det = 1.25 * kappa;
    const auto n_points =
        static_cast<std::int64_t>(std::floor(max_det / step)) + 1;

    std::vector<LockReport> sweep(static_cast<std::size_t>(n_points));
    parallel_for(n_points, static_cast<int>(cfg.integer("threads")),
                 [&](std::int64_t i) {
                     const double det = static_cast<double>(i) * step;
                     sweep[static_cast<std::size_t>(i)] = lock_at(
                         noise_free_cfg(power, det), window,
                         substream_seed(seed, static_cast<std::uint64_t>(i),
                                        StreamTag::slave_noise));
                 });
    double measured = 0.0;
    {
        CsvFile csv(out / "lockband.csv", "detuning_hz,locked,mean_freq_error_hz");
        for (std::int64_t i = 0; i < n_points; ++i) {
            const auto& r = sweep[static_cast<std::size_t>(i)];
            if (r.locked) measured = static_cast<double>(i) * step;
            csv.row(static_cast<double>(i) * step,
                    static_cast<std::int64_t>(r.locked ? 1 : 0),
                    r.mean_freq_error);
        }
    }

    // power table (the published curve's analog)
    const auto& powers = cfg.list("lockband.powers");
    std::vector<double> table_measured(powers.size(), 0.0);
    for (std::size_t p = 0; p < powers.size(); ++p) {
        const double kp = kappa_coeff * std::sqrt(powers[p] / slave_power);
        const auto np = static_cast<std::int64_t>(std::floor(1.25 * kp / step)) + 1;
        std::vector<char> locked_flags(static_cast<std::size_t>(np), 0);
        parallel_for(np, static_cast<int>(cfg.integer("threads")),
                     [&](std::int64_t i) {
                         const double det = static_cast<double>(i) * step;
                         locked_flags[static_cast<std::size_t>(i)] =
                             lock_at(noise_free_cfg(powers[p], det), window,
                                     substream_seed(
                                         seed,
                                         1000 + 1000 * p + static_cast<std::uint64_t>(i),
                                         StreamTag::slave_noise))
                                 .locked
                                 ? 1
                                 : 0;
                     });
        double meas = 0.0;
        for (std::int64_t i = 0; i < np; ++i)
            if (locked_flags[static_cast<std::size_t>(i)])
                meas = static_cast<double>(i) * step;
        table_measured[p] = meas;
    }
    {
        CsvFile csv(out / "power_table.csv",
                    "injection_power_w,predicted_bandwidth_hz,measured_bandwidth_hz");
        for (std::size_t p = 0; p < powers.size(); ++p)
            csv.row(powers[p], kappa_coeff * std::sqrt(powers[p] / slave_power),
                    table_measured[p]);
    }

    // published-condition check: does the configured free-running detuning
    // lock at the configured injection power, and where does the slave line
    // sit on the cavity scan afterwards
    InjectionConfig fig_cfg = injection_from_config(cfg, cfg.number("bob.detuning"));
    const double noisy_window = std::max(window * 10.0, 20e-6);
    const LockReport fig = lock_at(fig_cfg, noisy_window,
                                   substream_seed(seed, 500000,
                                                  StreamTag::slave_noise));
    const double slave_line_after =
        fig.locked ? 0.0 : fig.mean_freq_error;

    const double fsr = cfg.number("fp.fsr");
    const double finesse = cfg.number("fp.finesse");
    const double range = cfg.number("fp.scan_range");
    const auto points = static_cast<std::size_t>(cfg.integer("fp.points"));
    const double scan_step = range / static_cast<double>(points - 1);
    const double dnu_a = cfg.number("alice.linewidth");
    const double dnu_b = cfg.number("bob.linewidth");

    const FpScanTrace master_trace =
        fp_scan({{0.0, cfg.number("alice.power"), dnu_a}}, fsr, finesse, range, points);
    const FpScanTrace before_trace = fp_scan(
        {{cfg.number("bob.detuning"), slave_power, dnu_b}}, fsr, finesse, range, points);
    const FpScanTrace after_trace =
        fp_scan({{slave_line_after, slave_power, dnu_b}}, fsr, finesse, range, points);

    const double master_peak = scan_peaks(master_trace, 1).at(0);
    const double before_peak = scan_peaks(before_trace, 1).at(0);
    const double after_peak = scan_peaks(after_trace, 1).at(0);

    RunSummary summary;
    summary.scenario = "lockband";
    Metrics m;
    m.add("kappa_coeff_hz", kappa_coeff);
    m.add("sweep_power_w", power);
    m.add("predicted_bandwidth_hz", kappa);
    m.add("measured_bandwidth_hz", measured);
    m.add("sweep_step_hz", step);
    m.add_int("fig_locked", fig.locked ? 1 : 0);
    m.add("fig_injection_power_w", fig_cfg.injection_power);
    m.add("fig_detuning_hz", fig_cfg.slave.nu_offset);
    m.add("fig_mean_freq_error_hz", fig.mean_freq_error);
    m.add("scan_omega_diff_hz", before_peak - master_peak);
    m.add("scan_residual_hz", std::abs(after_peak - master_peak));
    m.add("scan_step_hz", scan_step);
    summary.metrics = m.rows;

    write_fp_csv(out / "fp_master.csv", master_trace);
    write_fp_csv(out / "fp_slave_before.csv", before_trace);
    write_fp_csv(out / "fp_slave_after.csv", after_trace);
    summary.artifacts = {"lockband.csv", "power_table.csv", "fp_master.csv",
                         "fp_slave_before.csv", "fp_slave_after.csv"};
    return summary;
}

// ---------------------------------------------------------------------------
// drift
// ---------------------------------------------------------------------------

double drift_offset(const DriftModel& d, double t_s, Rng& walk, double window_s) {
    switch (d.kind) {
        case DriftKind::none:
            return 0.0;
        case DriftKind::linear:
            return d.rate_hz_per_hour * (t_s / 3600.0);
        case DriftKind::random_walk:
            // caller advances the walk once per window in time order
            return walk.normal(0.0, d.rate_hz_per_hour *
                                        std::sqrt(window_s / 3600.0));
    }
    return 0.0;
}

RunSummary run_drift(const ScenarioConfig& cfg, const fs::path& out) {
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    const double duration = cfg.number("drift.duration");
    const auto windows = cfg.integer("drift.windows");
    if (windows < 1) throw ConfigError("config error: key 'drift.windows': must be >= 1");
    const double window_span = cfg.number("drift.window_span");
    const double dt_window = duration / static_cast<double>(windows);

    const LaserSpec alice = laser_from_config(cfg, "alice", 0.0);
    const LaserSpec bob = laser_from_config(cfg, "bob", cfg.number("bob.detuning"));

    // detuning trajectory across the hour, one value per window
    Rng walk_a(substream_seed(seed, 0, StreamTag::drift));
    Rng walk_b(substream_seed(seed, 1, StreamTag::drift));
    std::vector<double> detunings(static_cast<std::size_t>(windows));
    double acc_a = 0.0, acc_b = 0.0;
    for (std::int64_t w = 0; w < windows; ++w) {
        const double t = (static_cast<double>(w) + 0.5) * dt_window;
        double da = 0.0, db = 0.0;
        if (alice.drift.kind == DriftKind::random_walk) {
            acc_a += drift_offset(alice.drift, t, walk_a, dt_window);
            da = acc_a;
        } else {
            da = drift_offset(alice.drift, t, walk_a, dt_window);
        }
        if (bob.drift.kind == DriftKind::random_walk) {
            acc_b += drift_offset(bob.drift, t, walk_b, dt_window);
            db = acc_b;
        } else {
            db = drift_offset(bob.drift, t, walk_b, dt_window);
        }
        detunings[static_cast<std::size_t>(w)] = bob.nu_offset + db - da;
    }

    const double kappa = locking_bandwidth(injection_from_config(cfg, 0.0));
    std::vector<LockReport> reports(static_cast<std::size_t>(windows));
    parallel_for(windows, static_cast<int>(cfg.integer("threads")),
                 [&](std::int64_t w) {
                     InjectionConfig ic = injection_from_config(
                         cfg, detunings[static_cast<std::size_t>(w)]);
                     reports[static_cast<std::size_t>(w)] = lock_at(
                         ic, window_span,
                         substream_seed(seed, static_cast<std::uint64_t>(w),
                                        StreamTag::slave_noise));
                 });

    std::int64_t locked_count = 0;
    double first_unlock = -1.0;
    {
        CsvFile csv(out / "drift.csv",
                    "t_hour,detuning_hz,locked,mean_freq_error_hz");
        for (std::int64_t w = 0; w < windows; ++w) {
            const auto& r = reports[static_cast<std::size_t>(w)];
            const double t_hour =
                (static_cast<double>(w) + 0.5) * dt_window / 3600.0;
            locked_count += r.locked ? 1 : 0;
            if (!r.locked && first_unlock < 0.0) first_unlock = t_hour;
            csv.row(t_hour, detunings[static_cast<std::size_t>(w)],
                    static_cast<std::int64_t>(r.locked ? 1 : 0),
                    r.mean_freq_error);
        }
    }

    RunSummary summary;
    summary.scenario = "drift";
    Metrics m;
    m.add_int("windows", windows);
    m.add_int("windows_locked", locked_count);
    m.add("retention",
          static_cast<double>(locked_count) / static_cast<double>(windows));
    m.add("locking_bandwidth_hz", kappa);
    m.add("first_unlock_hour", first_unlock);
    summary.metrics = m.rows;
    summary.artifacts = {"drift.csv"};
    return summary;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> items;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t a = 0, b = item.size();
        while (a < b && std::isspace(static_cast<unsigned char>(item[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(item[b - 1]))) --b;
        if (b > a) items.push_back(item.substr(a, b - a));
    }
    return items;
}

RunSummary run_sweep(const ScenarioConfig& cfg, const fs::path& out) {
    const std::string base = cfg.word("sweep.base");
    const std::string key = cfg.word("sweep.key");
    const auto values = split_list(cfg.word("sweep.values"));
    if (values.empty())
        throw ConfigError("config error: key 'sweep.values': empty list");
    const auto seed = cfg.integer("seed");

    RunSummary summary;
    summary.scenario = "sweep";
    std::vector<RunSummary> runs;
    runs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        ScenarioConfig sub = cfg;
        sub.set("scenario", base);
        sub.set(key, values[i]);
        sub.set("seed", std::to_string(seed + 7919 * static_cast<std::int64_t>(i + 1)));
        sub.finalize();
        char name[32];
        std::snprintf(name, sizeof(name), "sweep_%03zu", i);
        const fs::path subdir = out / name;
        runs.push_back(run_scenario(sub, subdir.string()));
        summary.artifacts.push_back(std::string(name) + "/summary.csv");
    }

    // wide table: one row per swept value, columns from the first run
    {
        CsvFile csv(out / "sweep.csv", [&] {
            std::string header = "index," + key;
            for (const auto& kv : runs.front().metrics) header += "," + kv.first;
            return header;
        }());
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::string line = std::to_string(i) + "," + values[i];
            for (const auto& kv : runs.front().metrics) {
                const std::string* v = runs[i].find(kv.first);
                line += ",";
                line += v ? *v : "";
            }
            csv.row_text(line);
        }
    }
    summary.artifacts.insert(summary.artifacts.begin(), "sweep.csv");

    Metrics m;
    m.add_text("sweep_base", base);
    m.add_text("sweep_key", key);
    m.add_int("sweep_runs", static_cast<std::int64_t>(runs.size()));
    summary.metrics = m.rows;
    return summary;
}

void write_summary_csv(const fs::path& path, const RunSummary& s,
                       const ScenarioConfig& cfg) {
    CsvFile csv(path, "key,value");
    csv.row("scenario", s.scenario);
    for (const auto& kv : s.metrics) csv.row(kv.first, kv.second);
    for (std::size_t i = 0; i < s.artifacts.size(); ++i)
        csv.row("artifact." + std::to_string(i), s.artifacts[i]);
    for (const auto& kv : cfg.echo()) csv.row("config." + kv.first, kv.second);
}

} // namespace

RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

    const std::string& sc = cfg.scenario();
    RunSummary summary;
    if (sc == "hom-locked")
        summary = run_hom(cfg, out, true);
    else if (sc == "hom-unlocked")
        summary = run_hom(cfg, out, false);
    else if (sc == "beat")
        summary = run_beat(cfg, out);
    else if (sc == "lockband")
        summary = run_lockband(cfg, out);
    else if (sc == "drift")
        summary = run_drift(cfg, out);
    else if (sc == "sweep")
        summary = run_sweep(cfg, out);
    else
        throw ConfigError("config error: key 'scenario': unknown scenario '" +
                          sc + "'");

    summary.out_dir = out_dir;
    summary.artifacts.push_back("summary.csv");
    write_summary_csv(out / "summary.csv", summary, cfg);
    for (const auto& a : summary.artifacts) {
        std::error_code check;
        const auto sz = fs::file_size(out / a, check);
        if (check || sz == 0)
            throw IoError("artifact '" + a + "' missing or empty");
    }
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return summary;
}

} // namespace homsim
