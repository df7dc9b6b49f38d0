#include "homsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace homsim {

namespace {

struct KeySpec {
    const char* key;
    Dim dim;
    Dim element = Dim::plain; // for lists
    const char* def;
};

// Schema and paper-default values. Order here is the echo order.
const KeySpec kSchema[] = {
    {"scenario", Dim::word, Dim::plain, "hom-locked"},
    {"seed", Dim::integer, Dim::plain, "12345"},
    {"trials", Dim::integer, Dim::plain, "0"},
    {"threads", Dim::integer, Dim::plain, "0"},
    {"target_pairs", Dim::plain, Dim::plain, "2e7"},
    {"output_dir", Dim::word, Dim::plain, "sim_out"},

    {"alice.linewidth", Dim::freq, Dim::plain, "5 MHz"},
    {"alice.power", Dim::power, Dim::plain, "10 mW"},
    {"alice.drift", Dim::word, Dim::plain, "none"},
    {"alice.drift_rate", Dim::drift_rate, Dim::plain, "0 MHz/hour"},

    {"bob.linewidth", Dim::freq, Dim::plain, "5 MHz"},
    {"bob.power", Dim::power, Dim::plain, "10 mW"},
    {"bob.detuning", Dim::freq, Dim::plain, "267 MHz"},
    {"bob.drift", Dim::word, Dim::plain, "none"},
    {"bob.drift_rate", Dim::drift_rate, Dim::plain, "0 MHz/hour"},

    {"oil.length", Dim::length, Dim::plain, "25 km"},
    {"oil.attenuation", Dim::attenuation, Dim::plain, "0.2 dB/km"},
    {"oil.group_index", Dim::plain, Dim::plain, "1.468"},
    {"oil.injection_power", Dim::power, Dim::plain, "4 uW"},
    {"oil.kappa_coeff", Dim::freq, Dim::plain, "0 Hz"},
    {"oil.anchor_injection_power", Dim::power, Dim::plain, "12 uW"},
    {"oil.anchor_slave_power", Dim::power, Dim::plain, "10 mW"},
    {"oil.anchor_bandwidth", Dim::freq, Dim::plain, "760 MHz"},
    {"oil.slave_noise_factor", Dim::plain, Dim::plain, "1.0"},

    {"bc.length", Dim::length, Dim::plain, "50 km"},
    {"bc.attenuation", Dim::attenuation, Dim::plain, "0.2 dB/km"},
    {"bc.group_index", Dim::plain, Dim::plain, "1.468"},
    {"ac.length", Dim::length, Dim::plain, "0 km"},
    {"ac.attenuation", Dim::attenuation, Dim::plain, "0.2 dB/km"},
    {"ac.group_index", Dim::plain, Dim::plain, "1.468"},

    {"charlie.pol_overlap", Dim::plain, Dim::plain, "0.98"},
    {"charlie.arm_ratio", Dim::plain, Dim::plain, "1.0"},

    {"det.efficiency", Dim::plain, Dim::plain, "0.8"},
    {"det.dark_rate", Dim::freq, Dim::plain, "100 Hz"},
    {"det.dead_time", Dim::time, Dim::plain, "10 ns"},
    {"det.jitter", Dim::time, Dim::plain, "50 ps"},
    {"det.rate_per_watt", Dim::inv_power, Dim::plain, "3e13 Hz/W"},

    {"hist.bin", Dim::time, Dim::plain, "0.5 ns"},
    {"hist.max_tau", Dim::time, Dim::plain, "0 s"},

    {"grid.dt", Dim::time, Dim::plain, "0 s"},
    {"grid.det_dt", Dim::time, Dim::plain, "0 s"},
    {"grid.span", Dim::time, Dim::plain, "0 s"},
    {"channel.delay_cap", Dim::time, Dim::plain, "10 us"},

    {"aom.shift", Dim::freq, Dim::plain, "80 MHz"},
    {"beat.span", Dim::time, Dim::plain, "2 ms"},
    {"beat.noise_scale", Dim::plain, Dim::plain, "1.0"},
    {"psd.segment", Dim::integer, Dim::plain, "0"},

    {"lockband.power", Dim::power, Dim::plain, "12 uW"},
    {"lockband.step", Dim::freq, Dim::plain, "5 MHz"},
    {"lockband.max_detuning", Dim::freq, Dim::plain, "0 Hz"},
    {"lockband.window", Dim::time, Dim::plain, "2 us"},
    {"lockband.powers", Dim::list, Dim::power,
     "1 uW, 2 uW, 4 uW, 8 uW, 12 uW, 16 uW"},

    {"fp.fsr", Dim::freq, Dim::plain, "1.5 GHz"},
    {"fp.finesse", Dim::plain, Dim::plain, "100"},
    {"fp.scan_range", Dim::freq, Dim::plain, "1.8 GHz"},
    {"fp.points", Dim::integer, Dim::plain, "1801"},

    {"drift.duration", Dim::time, Dim::plain, "1 hour"},
    {"drift.windows", Dim::integer, Dim::plain, "60"},
    {"drift.window_span", Dim::time, Dim::plain, "2 us"},

    {"sweep.base", Dim::word, Dim::plain, "hom-locked"},
    {"sweep.key", Dim::word, Dim::plain, "charlie.pol_overlap"},
    {"sweep.values", Dim::list, Dim::plain, "1.0, 0.9, 0.7, 0.0"},
};

const KeySpec* find_key(const std::string& key) {
    for (const auto& s : kSchema)
        if (key == s.key) return &s;
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct UnitEntry {
    const char* name;
    double factor;
};

const UnitEntry kFreqUnits[] = {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6},
                                {"GHz", 1e9}, {"THz", 1e12}};
const UnitEntry kTimeUnits[] = {{"s", 1.0},    {"ms", 1e-3}, {"us", 1e-6},
                                {"ns", 1e-9},  {"ps", 1e-12},
                                {"min", 60.0}, {"hour", 3600.0}, {"h", 3600.0}};
const UnitEntry kPowerUnits[] = {{"W", 1.0},   {"mW", 1e-3}, {"uW", 1e-6},
                                 {"nW", 1e-9}, {"pW", 1e-12}};
const UnitEntry kLengthUnits[] = {{"m", 1.0}, {"km", 1e3}};

const char* expected_unit(Dim dim) {
    switch (dim) {
        case Dim::freq: return "a frequency unit (Hz/kHz/MHz/GHz)";
        case Dim::time: return "a time unit (s/ms/us/ns/ps/min/hour)";
        case Dim::power: return "a power unit (W/mW/uW/nW)";
        case Dim::length: return "a length unit (m/km)";
        case Dim::attenuation: return "dB/km";
        case Dim::drift_rate: return "a drift unit (Hz/hour etc.)";
        case Dim::inv_power: return "a rate-per-power unit (Hz/W etc.)";
        default: return "a plain number";
    }
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& msg) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " (line " << line << ")";
    os << ": key '" << key << "': " << msg;
    throw ConfigError(os.str());
}

double parse_number_token(const std::string& tok, const std::string& key,
                          int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        fail(key, line, "'" + tok + "' is not a number");
    }
    if (pos != tok.size()) fail(key, line, "'" + tok + "' is not a number");
    return v;
}

/// Splits "5 MHz" / "5MHz" / "1.468" into number and unit text.
void split_value(const std::string& value, std::string& num, std::string& unit) {
    std::size_t i = 0;
    while (i < value.size() &&
           (std::isdigit(static_cast<unsigned char>(value[i])) ||
            value[i] == '+' || value[i] == '-' || value[i] == '.' ||
            value[i] == 'e' || value[i] == 'E' ||
            ((value[i] == '+' || value[i] == '-') && i > 0 &&
             (value[i - 1] == 'e' || value[i - 1] == 'E'))))
        ++i;
    num = trim(value.substr(0, i));
    unit = trim(value.substr(i));
}

double convert(Dim dim, const std::string& value, const std::string& key,
               int line) {
    std::string num, unit;
    split_value(value, num, unit);
    if (num.empty()) fail(key, line, "missing numeric value in '" + value + "'");
    const double v = parse_number_token(num, key, line);

    auto lookup = [&](const UnitEntry* table, std::size_t n,
                      const std::string& u) -> double {
        for (std::size_t i = 0; i < n; ++i)
            if (u == table[i].name) return table[i].factor;
        fail(key, line, "unknown unit '" + u + "', expected " +
                            expected_unit(dim));
    };

    switch (dim) {
        case Dim::plain:
            if (!unit.empty())
                fail(key, line, "dimensionless key, got unit '" + unit + "'");
            return v;
        case Dim::integer: {
            if (!unit.empty())
                fail(key, line, "integer key, got unit '" + unit + "'");
            if (v != std::floor(v)) fail(key, line, "expected an integer");
            return v;
        }
        case Dim::freq:
            if (unit.empty())
                fail(key, line, "missing unit, expected " + std::string(expected_unit(dim)));
            return v * lookup(kFreqUnits, std::size(kFreqUnits), unit);
        case Dim::time:
            if (unit.empty())
                fail(key, line, "missing unit, expected " + std::string(expected_unit(dim)));
            return v * lookup(kTimeUnits, std::size(kTimeUnits), unit);
        case Dim::power:
            if (unit.empty())
                fail(key, line, "missing unit, expected " + std::string(expected_unit(dim)));
            return v * lookup(kPowerUnits, std::size(kPowerUnits), unit);
        case Dim::length:
            if (unit.empty())
                fail(key, line, "missing unit, expected " + std::string(expected_unit(dim)));
            return v * lookup(kLengthUnits, std::size(kLengthUnits), unit);
        case Dim::attenuation:
            if (unit != "dB/km")
                fail(key, line, "expected dB/km, got '" + unit + "'");
            return v;
        case Dim::drift_rate: {
            const auto slash = unit.find('/');
            if (slash == std::string::npos)
                fail(key, line, "expected <freq>/hour, got '" + unit + "'");
            const std::string fu = unit.substr(0, slash);
            const std::string tu = unit.substr(slash + 1);
            if (tu != "hour" && tu != "h")
                fail(key, line, "drift rates are per hour, got '/" + tu + "'");
            return v * lookup(kFreqUnits, std::size(kFreqUnits), fu);
        }
        case Dim::inv_power: {
            const auto slash = unit.find('/');
            if (slash == std::string::npos || unit.substr(slash + 1) != "W")
                fail(key, line, "expected <freq>/W, got '" + unit + "'");
            return v * lookup(kFreqUnits, std::size(kFreqUnits),
                              unit.substr(0, slash));
        }
        case Dim::word:
        case Dim::list:
            break;
    }
    fail(key, line, "internal: unhandled dimension");
}

} // namespace

ScenarioConfig::ScenarioConfig() {
    for (const auto& s : kSchema) {
        Entry e;
        e.raw = s.def;
        if (s.dim == Dim::list) {
            std::stringstream ss(e.raw);
            std::string item;
            while (std::getline(ss, item, ','))
                e.values.push_back(convert(s.element, trim(item), s.key, 0));
        } else if (s.dim != Dim::word) {
            e.num = convert(s.dim, e.raw, s.key, 0);
        }
        entries_[s.key] = std::move(e);
    }
}

void ScenarioConfig::set(const std::string& key, const std::string& value,
                         int line_number) {
    const KeySpec* spec = find_key(key);
    if (!spec) fail(key, line_number, "unknown key");
    Entry e;
    e.raw = trim(value);
    e.user_set = true;
    if (e.raw.empty()) fail(key, line_number, "empty value");
    if (spec->dim == Dim::list) {
        std::stringstream ss(e.raw);
        std::string item;
        while (std::getline(ss, item, ','))
            e.values.push_back(convert(spec->element, trim(item), key, line_number));
        if (e.values.empty()) fail(key, line_number, "empty list");
    } else if (spec->dim != Dim::word) {
        e.num = convert(spec->dim, e.raw, key, line_number);
    }
    entries_[key] = std::move(e);
}

double ScenarioConfig::number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key: " + key);
    return it->second.num;
}

std::int64_t ScenarioConfig::integer(const std::string& key) const {
    return static_cast<std::int64_t>(number(key));
}

const std::string& ScenarioConfig::word(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key: " + key);
    return it->second.raw;
}

const std::vector<double>& ScenarioConfig::list(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key: " + key);
    return it->second.values;
}

bool ScenarioConfig::is_default(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() || !it->second.user_set;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(std::size(kSchema));
    for (const auto& s : kSchema)
        out.emplace_back(s.key, entries_.at(s.key).raw);
    return out;
}

void ScenarioConfig::finalize() {
    static const char* kScenarios[] = {"beat",       "lockband",
                                       "hom-locked", "hom-unlocked",
                                       "drift",      "sweep"};
    const std::string& sc = scenario();
    if (std::find_if(std::begin(kScenarios), std::end(kScenarios),
                     [&](const char* s) { return sc == s; }) ==
        std::end(kScenarios))
        throw ConfigError("config error: key 'scenario': unknown scenario '" +
                          sc + "'");

    // scenario-conditional defaults that track the published setups
    if (sc == "hom-unlocked" && is_default("bob.detuning"))
        set("bob.detuning", "153 MHz");
    if (sc == "drift" && is_default("bob.drift") &&
        is_default("bob.drift_rate")) {
        set("bob.drift", "linear");
        set("bob.drift_rate", "100 MHz/hour");
    }

    auto drift_ok = [](const std::string& w) {
        return w == "none" || w == "linear" || w == "random-walk";
    };
    if (!drift_ok(word("alice.drift")))
        throw ConfigError("config error: key 'alice.drift': expected "
                          "none|linear|random-walk");
    if (!drift_ok(word("bob.drift")))
        throw ConfigError("config error: key 'bob.drift': expected "
                          "none|linear|random-walk");

    auto positive = [&](const char* key) {
        if (!(number(key) > 0.0))
            throw ConfigError(std::string("config error: key '") + key +
                              "': must be > 0");
    };
    positive("alice.linewidth");
    positive("alice.power");
    positive("bob.power");
    positive("hist.bin");
    positive("det.rate_per_watt");
    if (number("charlie.pol_overlap") < 0.0 || number("charlie.pol_overlap") > 1.0)
        throw ConfigError("config error: key 'charlie.pol_overlap': must be in [0, 1]");
    if (number("det.efficiency") < 0.0 || number("det.efficiency") > 1.0)
        throw ConfigError("config error: key 'det.efficiency': must be in [0, 1]");
    if (number("oil.slave_noise_factor") < 0.0)
        throw ConfigError("config error: key 'oil.slave_noise_factor': must be >= 0");
    if (integer("seed") < 0)
        throw ConfigError("config error: key 'seed': must be >= 0");
    if (sc == "sweep" && word("sweep.base") == "sweep")
        throw ConfigError("config error: key 'sweep.base': nested sweep");
}

namespace {

ScenarioConfig parse_lines(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config error (line " << line_number
               << "): expected 'key = value', got '" << line << "'";
            throw ConfigError(os.str());
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_number);
    }
    return cfg;
}

} // namespace

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    ScenarioConfig cfg = parse_lines(in);
    cfg.finalize();
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    ScenarioConfig cfg = parse_lines(in);
    cfg.finalize();
    return cfg;
}

} // namespace homsim
