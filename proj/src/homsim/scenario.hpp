#pragma once

#include <string>
#include <utility>
#include <vector>

#include "homsim/config.hpp"

namespace homsim {

/// Outcome of one scenario run: ordered metrics, emitted artifact files
/// (paths relative to the output directory), and wall time. Wall time is
/// echoed to stdout only, never into CSV files, so identical configs yield
/// byte-identical artifacts.
struct RunSummary {
    std::string scenario;
    std::vector<std::pair<std::string, std::string>> metrics;
    std::vector<std::string> artifacts;
    std::string out_dir;
    double wall_seconds = 0.0;

    const std::string* find(const std::string& key) const {
        for (const auto& kv : metrics)
            if (kv.first == key) return &kv.second;
        return nullptr;
    }
};

/// Runs the configured scenario, writes its CSV artifacts into `out_dir`
/// (created if needed), and returns the summary. Also writes summary.csv.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

} // namespace homsim
