/*
 * homsim - CW-laser Hong-Ou-Mandel / optical-injection-locking simulator.
 *
 * C interface to the simulation core. All functions return a homsim_status
 * (0 on success); on failure homsim_last_error() describes what went wrong.
 * Handles are opaque and must be released with the matching _free call.
 * The library is thread-compatible: distinct handles may be used from
 * distinct threads; a single handle must not be shared concurrently.
 */
#ifndef HOMSIM_H
#define HOMSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum homsim_status {
    HOMSIM_OK = 0,
    HOMSIM_ERR_CONFIG = 2,  /* bad config file, key, unit, or value */
    HOMSIM_ERR_RUNTIME = 3, /* physics/numerics precondition failed */
    HOMSIM_ERR_IO = 4       /* output directory or file failure */
} homsim_status;

typedef struct homsim_config homsim_config;
typedef struct homsim_summary homsim_summary;

const char* homsim_version(void);

/* Message for the most recent failure on this thread. */
const char* homsim_last_error(void);

/* Configuration ----------------------------------------------------------- */

/* All-defaults configuration (the published experimental setup). */
homsim_status homsim_config_new(homsim_config** out);

/* Strict key = value parse; unknown keys and missing units are errors. */
homsim_status homsim_config_parse_file(const char* path, homsim_config** out);
homsim_status homsim_config_parse_string(const char* text, homsim_config** out);

/* Overrides one key, e.g. homsim_config_set(c, "bob.detuning", "153 MHz"). */
homsim_status homsim_config_set(homsim_config* cfg, const char* key,
                                const char* value);

/* Textual value of one key (valid until the next set/free). */
homsim_status homsim_config_get(const homsim_config* cfg, const char* key,
                                const char** value);

void homsim_config_free(homsim_config* cfg);

/* Scenario runner ---------------------------------------------------------- */

/*
 * Runs the configured scenario and writes its CSV artifacts into out_dir
 * (created if needed). out_dir NULL uses the config's output_dir key.
 */
homsim_status homsim_run(const homsim_config* cfg, const char* out_dir,
                         homsim_summary** out);

size_t homsim_summary_size(const homsim_summary* s);
const char* homsim_summary_key(const homsim_summary* s, size_t index);
const char* homsim_summary_value(const homsim_summary* s, size_t index);

/* Numeric metric lookup; fails with HOMSIM_ERR_RUNTIME if absent. */
homsim_status homsim_summary_metric(const homsim_summary* s, const char* key,
                                    double* value);

const char* homsim_summary_scenario(const homsim_summary* s);
const char* homsim_summary_out_dir(const homsim_summary* s);
double homsim_summary_wall_seconds(const homsim_summary* s);

void homsim_summary_free(homsim_summary* s);

/* Direct physics helpers --------------------------------------------------- */

/* Coherence length c/linewidth [m]; NaN and an error message on bad input. */
double homsim_coherence_length_m(double linewidth_hz);

/* Locking bandwidth kappa_coeff*sqrt(p_injection/p_slave) [Hz]. */
double homsim_locking_bandwidth_hz(double p_injection_w, double p_slave_w,
                                   double kappa_coeff_hz);

/* Normalized coincidence probability baseline*(1 - V e^{-gamma|tau|} cos(omega tau)). */
double homsim_hom_pcoin(double tau_s, double visibility, double gamma_rate,
                        double omega_rad_s, double baseline);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HOMSIM_H */
