#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homsim/common.hpp"

namespace homsim {

/// Physical dimension a config value must carry. Every physical quantity in a
/// config file needs an explicit unit suffix; plain numbers are accepted only
/// for dimensionless keys.
enum class Dim {
    plain,      ///< dimensionless real
    integer,    ///< dimensionless integer
    word,       ///< enumerated string
    freq,       ///< Hz
    time,       ///< s
    power,      ///< W
    length,     ///< m (config files use m/km)
    attenuation,///< dB/km
    drift_rate, ///< Hz per hour
    inv_power,  ///< Hz per W
    list,       ///< comma-separated values, element dimension per key
};

/// Parsed, validated scenario configuration. Values are stored in SI base
/// units; the raw strings are kept for the summary echo.
class ScenarioConfig {
public:
    /// Builds the all-defaults configuration.
    ScenarioConfig();

    /// Sets one key from its textual form; validates name, unit, and value.
    void set(const std::string& key, const std::string& value,
             int line_number = 0);

    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    const std::string& word(const std::string& key) const;
    const std::vector<double>& list(const std::string& key) const;
    bool is_default(const std::string& key) const;

    /// (key, textual value) pairs for every key, in schema order.
    std::vector<std::pair<std::string, std::string>> echo() const;

    const std::string& scenario() const { return word("scenario"); }

    /// Scenario-conditional defaults (e.g. the unlocked fringe detuning) and
    /// cross-key validation. Called after parsing, before running.
    void finalize();

private:
    struct Entry {
        std::string raw;
        double num = 0.0;
        std::vector<double> values;
        bool user_set = false;
    };
    std::map<std::string, Entry> entries_;
};

/// Strict parse of a key = value config file. Unknown keys, missing units,
/// and malformed numbers fail with the key name and line number.
ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

} // namespace homsim
