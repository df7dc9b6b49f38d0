// Scenario-runner CLI. Talks to the simulation core exclusively through the
// public C interface in homsim.h.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "homsim.h"

namespace {

int fail(homsim_status status) {
    std::fprintf(stderr, "sim: error: %s\n", homsim_last_error());
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CW coherent-photon interference and injection-locking simulator"};
    app.set_version_flag("--version", homsim_version());

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    long long trials = -1;
    bool quiet = false;

    app.add_option("config", config_path,
                   "scenario config file (key = value, unit-suffixed)")
        ->required();
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--trials", trials, "override the config trial count");
    app.add_flag("--quiet", quiet, "suppress the summary echo on stdout");

    CLI11_PARSE(app, argc, argv);

    homsim_config* cfg = nullptr;
    homsim_status st = homsim_config_parse_file(config_path.c_str(), &cfg);
    if (st != HOMSIM_OK) return fail(st);

    if (seed >= 0) {
        st = homsim_config_set(cfg, "seed", std::to_string(seed).c_str());
        if (st != HOMSIM_OK) {
            homsim_config_free(cfg);
            return fail(st);
        }
    }
    if (trials >= 0) {
        st = homsim_config_set(cfg, "trials", std::to_string(trials).c_str());
        if (st != HOMSIM_OK) {
            homsim_config_free(cfg);
            return fail(st);
        }
    }

    homsim_summary* summary = nullptr;
    st = homsim_run(cfg, out_dir.empty() ? nullptr : out_dir.c_str(), &summary);
    homsim_config_free(cfg);
    if (st != HOMSIM_OK) return fail(st);

    if (!quiet) {
        std::printf("scenario = %s\n", homsim_summary_scenario(summary));
        const size_t n = homsim_summary_size(summary);
        for (size_t i = 0; i < n; ++i)
            std::printf("%s = %s\n", homsim_summary_key(summary, i),
                        homsim_summary_value(summary, i));
        std::printf("artifacts = %s\n", homsim_summary_out_dir(summary));
        std::printf("wall_seconds = %.3f\n",
                    homsim_summary_wall_seconds(summary));
    }
    homsim_summary_free(summary);
    return 0;
}
