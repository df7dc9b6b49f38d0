#include "homsim.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "homsim/analysis.hpp"
#include "homsim/config.hpp"
#include "homsim/injection.hpp"
#include "homsim/phasenoise.hpp"
#include "homsim/scenario.hpp"

struct homsim_config {
    homsim::ScenarioConfig cfg;
    mutable std::string scratch;
};

struct homsim_summary {
    homsim::RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

homsim_status to_status(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const homsim::ConfigError*>(&e)) return HOMSIM_ERR_CONFIG;
    if (dynamic_cast<const homsim::IoError*>(&e)) return HOMSIM_ERR_IO;
    return HOMSIM_ERR_RUNTIME;
}

template <typename Fn>
homsim_status guarded(Fn&& fn) {
    try {
        fn();
        return HOMSIM_OK;
    } catch (const std::exception& e) {
        return to_status(e);
    } catch (...) {
        g_last_error = "unknown error";
        return HOMSIM_ERR_RUNTIME;
    }
}

homsim_status invalid_arg(const char* what) {
    g_last_error = what;
    return HOMSIM_ERR_CONFIG;
}

} // namespace

extern "C" {

const char* homsim_version(void) { return "0.1.0"; }

const char* homsim_last_error(void) { return g_last_error.c_str(); }

homsim_status homsim_config_new(homsim_config** out) {
    if (!out) return invalid_arg("homsim_config_new: null output pointer");
    return guarded([&] {
        auto handle = new homsim_config{};
        handle->cfg.finalize();
        *out = handle;
    });
}

homsim_status homsim_config_parse_file(const char* path, homsim_config** out) {
    if (!out || !path)
        return invalid_arg("homsim_config_parse_file: null argument");
    return guarded(
        [&] { *out = new homsim_config{homsim::parse_config_file(path), {}}; });
}

homsim_status homsim_config_parse_string(const char* text, homsim_config** out) {
    if (!out || !text)
        return invalid_arg("homsim_config_parse_string: null argument");
    return guarded(
        [&] { *out = new homsim_config{homsim::parse_config_text(text), {}}; });
}

homsim_status homsim_config_set(homsim_config* cfg, const char* key,
                                const char* value) {
    if (!cfg || !key || !value)
        return invalid_arg("homsim_config_set: null argument");
    return guarded([&] {
        cfg->cfg.set(key, value);
        cfg->cfg.finalize();
    });
}

homsim_status homsim_config_get(const homsim_config* cfg, const char* key,
                                const char** value) {
    if (!cfg || !key || !value)
        return invalid_arg("homsim_config_get: null argument");
    return guarded([&] {
        cfg->scratch = cfg->cfg.word(key);
        *value = cfg->scratch.c_str();
    });
}

void homsim_config_free(homsim_config* cfg) { delete cfg; }

homsim_status homsim_run(const homsim_config* cfg, const char* out_dir,
                         homsim_summary** out) {
    if (!cfg || !out) return invalid_arg("homsim_run: null argument");
    return guarded([&] {
        const std::string dir =
            out_dir ? out_dir : cfg->cfg.word("output_dir");
        auto summary = homsim::run_scenario(cfg->cfg, dir);
        *out = new homsim_summary{std::move(summary)};
    });
}

size_t homsim_summary_size(const homsim_summary* s) {
    return s ? s->summary.metrics.size() : 0;
}

const char* homsim_summary_key(const homsim_summary* s, size_t index) {
    if (!s || index >= s->summary.metrics.size()) return nullptr;
    return s->summary.metrics[index].first.c_str();
}

const char* homsim_summary_value(const homsim_summary* s, size_t index) {
    if (!s || index >= s->summary.metrics.size()) return nullptr;
    return s->summary.metrics[index].second.c_str();
}

homsim_status homsim_summary_metric(const homsim_summary* s, const char* key,
                                    double* value) {
    if (!s || !key || !value)
        return invalid_arg("homsim_summary_metric: null argument");
    const std::string* v = s->summary.find(key);
    if (!v) {
        g_last_error = std::string("metric not found: ") + key;
        return HOMSIM_ERR_RUNTIME;
    }
    *value = std::strtod(v->c_str(), nullptr);
    return HOMSIM_OK;
}

const char* homsim_summary_scenario(const homsim_summary* s) {
    return s ? s->summary.scenario.c_str() : nullptr;
}

const char* homsim_summary_out_dir(const homsim_summary* s) {
    return s ? s->summary.out_dir.c_str() : nullptr;
}

double homsim_summary_wall_seconds(const homsim_summary* s) {
    return s ? s->summary.wall_seconds : 0.0;
}

void homsim_summary_free(homsim_summary* s) { delete s; }

double homsim_coherence_length_m(double linewidth_hz) {
    double out = std::numeric_limits<double>::quiet_NaN();
    guarded([&] { out = homsim::coherence_length(linewidth_hz); });
    return out;
}

double homsim_locking_bandwidth_hz(double p_injection_w, double p_slave_w,
                                   double kappa_coeff_hz) {
    double out = std::numeric_limits<double>::quiet_NaN();
    guarded([&] {
        homsim::InjectionConfig cfg;
        cfg.injection_power = p_injection_w;
        cfg.slave_power = p_slave_w;
        cfg.kappa_coeff = kappa_coeff_hz;
        cfg.slave.linewidth_fwhm = 0.0;
        cfg.slave.power = p_slave_w;
        out = homsim::locking_bandwidth(cfg);
    });
    return out;
}

double homsim_hom_pcoin(double tau_s, double visibility, double gamma_rate,
                        double omega_rad_s, double baseline) {
    double out = std::numeric_limits<double>::quiet_NaN();
    guarded([&] {
        homsim::HomModel m;
        m.visibility = visibility;
        m.gamma_rate = gamma_rate;
        m.omega_diff = omega_rad_s;
        m.baseline = baseline;
        out = homsim::analytic_pcoin(tau_s, m);
    });
    return out;
}

} // extern "C"
