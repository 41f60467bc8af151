#include "uavsim/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace uavsim {

namespace {

KeySpec
IntKey(std::string name, int64_t def, double min, double max)
{
    return {std::move(name), KeyType::Int, std::to_string(def), min, max, false, {}};
}

KeySpec
RealKey(std::string name, double def, double min, double max, bool minExclusive = false)
{
    return {std::move(name), KeyType::Real, fmt::format("{}", def), min, max, minExclusive, {}};
}

KeySpec
ChoiceKey(std::string name, std::vector<std::string> choices)
{
    std::string def = choices.front();
    return {std::move(name), KeyType::Choice, def, 0, 0, false, std::move(choices)};
}

std::string_view
Trim(std::string_view s)
{
    const auto notSpace = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
    auto b = std::find_if(s.begin(), s.end(), notSpace);
    auto e = std::find_if(s.rbegin(), s.rend(), notSpace).base();
    return b < e ? std::string_view(&*b, static_cast<size_t>(e - b)) : std::string_view{};
}

const KeySpec*
FindKey(const std::string& key)
{
    for (const KeySpec& k : ConfigSchema())
    {
        if (k.name == key)
        {
            return &k;
        }
    }
    return nullptr;
}

std::string
Canonical(const KeySpec& spec, const std::string& raw)
{
    const std::string value(Trim(raw));
    if (spec.type == KeyType::Choice)
    {
        if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
        {
            std::string allowed;
            for (const auto& c : spec.choices)
            {
                allowed += (allowed.empty() ? "" : ", ") + c;
            }
            throw ConfigError(spec.name, fmt::format("'{}' is not one of {{{}}}", value, allowed));
        }
        return value;
    }
    double v = 0;
    if (spec.type == KeyType::Int)
    {
        int64_t i = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), i);
        if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
        {
            throw ConfigError(spec.name, fmt::format("'{}' is not an integer", value));
        }
        v = static_cast<double>(i);
    }
    else
    {
        std::istringstream in(value);
        in >> v;
        if (value.empty() || in.fail() || !in.eof() || !std::isfinite(v))
        {
            throw ConfigError(spec.name, fmt::format("'{}' is not a number", value));
        }
    }
    const bool belowMin = spec.minExclusive ? v <= spec.min : v < spec.min;
    if (belowMin || v > spec.max)
    {
        throw ConfigError(spec.name,
                          fmt::format("{} out of range {}{}, {}]", value, spec.minExclusive ? "(" : "[", spec.min, spec.max));
    }
    if (spec.type == KeyType::Int)
    {
        return fmt::format("{}", static_cast<int64_t>(v));
    }
    return fmt::format("{}", v);
}

} // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message),
      m_key(std::move(key))
{
}

const std::vector<KeySpec>&
ConfigSchema()
{
    static const std::vector<KeySpec> schema = {
        ChoiceKey("technology", {"wifi", "lte", "stub"}),
        ChoiceKey("app", {"telemetry", "task", "both"}),
        RealKey("horizon_s", 60, 0, 3600, true),

        ChoiceKey("pathloss.regime", {"nlos", "los"}),
        RealKey("pathloss.c_offset_db", 0, -100, 100),
        RealKey("pathloss.diffraction_coeff_db", 60, 0, 200),
        RealKey("pathloss.diffraction_floor_db", -74, -200, 200),
        RealKey("pathloss.l_ew_db", 0, 0, 100),
        RealKey("pathloss.g_h_db_per_m", -0.1, -10, 0),
        RealKey("pathloss.g_h_cap_db", -6, -100, 0),
        RealKey("shadowing.sigma_db", 3, 0, 30),
        RealKey("radio.noise_figure_db", 7, 0, 30),
        RealKey("radio.per_softness_db", 1, 0, 20, true),

        ChoiceKey("wifi.standard", {"802.11a"}),
        ChoiceKey("wifi.bandwidth_mhz", {"20"}),
        RealKey("wifi.frequency_ghz", 5.18, 2, 6),
        RealKey("wifi.tx_power_dbm", 20, -10, 30),
        IntKey("wifi.retry_limit", 7, 0, 255),
        IntKey("wifi.queue_frames", 400, 1, 100000),

        ChoiceKey("lte.bandwidth_mhz", {"20", "15", "10", "5", "3", "1.4"}),
        IntKey("lte.n_prb", 100, 1, 100),
        RealKey("lte.frequency_ghz", 2.0, 0.4, 6),
        RealKey("lte.ue_tx_power_dbm", 23, -40, 30),
        RealKey("lte.enb_tx_power_dbm", 30, -10, 50),
        IntKey("lte.sr_period_ms", 5, 0, 80),
        IntKey("lte.ul_max_cqi", 9, 1, 15),
        ChoiceKey("lte.rlc_mode", {"am"}),
        IntKey("lte.max_retx", 4, 0, 32),
        RealKey("lte.overhead", 0.25, 0, 0.9),
        IntKey("lte.rlc_buffer_bytes", 1000000, 1000, 1e9),
        IntKey("lte.rlc_retx_ms", 8, 1, 1000),
        IntKey("lte.cqi_period_ms", 10, 1, 1000),

        ChoiceKey("transport.mode", {"reliable", "datagram"}),
        IntKey("transport.mss", 1460, 100, 9000),
        IntKey("transport.min_rto_ms", 200, 1, 60000),
        IntKey("transport.send_buffer_bytes", 262144, 1000, 1e9),

        ChoiceKey("uav.trajectory", {"rectangle", "orbit"}),
        RealKey("uav.speed_mps", 5, 0, 50, true),
        RealKey("uav.altitude_m", 30, 1, 500),
        RealKey("uav.dwell_s", 2, 0, 600),
        RealKey("uav.orbit_radius_m", 20, 0, 1000, true),
        RealKey("uav.rect_width_m", 64, 0, 1000, true),
        RealKey("uav.rect_height_m", 48, 0, 1000, true),
        RealKey("uav.battery_drain_per_s", 0.001, 0, 1),

        RealKey("bs.height_m", 10, 1, 200),
        IntKey("ground.n_nodes", 0, 0, 64),
        RealKey("ground.radius_m", 10, 0, 1000, true),
        RealKey("ground.height_m", 1.5, 0, 100),

        RealKey("telemetry.freq_hz", 10, 0, 1000, true),
        IntKey("telemetry.payload_bytes", 128, 1, 1400),
        ChoiceKey("telemetry.estimator", {"zoh", "cv"}),
        ChoiceKey("telemetry.error_norm", {"3d", "2d"}),
        IntKey("telemetry.sample_ms", 10, 1, 1000),

        RealKey("task.size_kb", 50, 0, 100000, true),
        RealKey("task.period_s", 1, 0, 3600, true),

        RealKey("exogenous.rate_mbps", 6, 0, 1000, true),
        IntKey("exogenous.packet_bytes", 800, 1, 1472),

        RealKey("stub.delay_ms", 0, 0, 10000),
        RealKey("stub.loss", 0, 0, 1),
        RealKey("stub.jitter_ms", 0, 0, 10000),
    };
    return schema;
}

const std::map<std::string, std::map<std::string, std::string>>&
Presets()
{
    static const std::map<std::string, std::map<std::string, std::string>> presets = {
        {"no_load", {{"ground.n_nodes", "0"}}},
        {"high_load", {{"ground.n_nodes", "8"}, {"exogenous.rate_mbps", "6"}}},
        {"low_distance", {{"uav.trajectory", "orbit"}, {"uav.orbit_radius_m", "10"}}},
        {"high_distance", {{"uav.trajectory", "orbit"}, {"uav.orbit_radius_m", "40"}}},
    };
    return presets;
}

ScenarioConfig::ScenarioConfig()
{
    for (const KeySpec& k : ConfigSchema())
    {
        m_values[k.name] = k.defaultValue;
    }
}

void
ScenarioConfig::Set(const std::string& key, const std::string& value)
{
    if (key == "preset")
    {
        ApplyPresets(value);
        return;
    }
    const KeySpec* spec = FindKey(key);
    if (spec == nullptr)
    {
        throw ConfigError(key, "unknown key");
    }
    m_values[key] = Canonical(*spec, value);
    CheckConsistency();
}

void
ScenarioConfig::ApplyPresets(const std::string& list)
{
    std::map<std::string, std::string> merged;
    std::stringstream in(list);
    std::string name;
    while (std::getline(in, name, ','))
    {
        const std::string n(Trim(name));
        auto it = Presets().find(n);
        if (it == Presets().end())
        {
            throw ConfigError("preset", fmt::format("unknown preset '{}'", n));
        }
        for (const auto& [k, v] : it->second)
        {
            auto prev = merged.find(k);
            if (prev != merged.end() && prev->second != v)
            {
                throw ConfigError("preset", fmt::format("presets disagree on {}", k));
            }
            merged[k] = v;
        }
    }
    for (const auto& [k, v] : merged)
    {
        Set(k, v);
    }
}

void
ScenarioConfig::CheckConsistency() const
{
    static const std::map<std::string, int64_t> maxPrb = {
        {"1.4", 6}, {"3", 15}, {"5", 25}, {"10", 50}, {"15", 75}, {"20", 100}};
    const int64_t limit = maxPrb.at(m_values.at("lte.bandwidth_mhz"));
    if (Int("lte.n_prb") > limit)
    {
        throw ConfigError("lte.n_prb",
                          fmt::format("{} exceeds {} PRBs available at {} MHz",
                                      Int("lte.n_prb"),
                                      limit,
                                      m_values.at("lte.bandwidth_mhz")));
    }
}

ScenarioConfig
ScenarioConfig::Parse(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::set<std::string> seen;
    std::optional<std::string> presets;
    size_t lineNo = 0;
    size_t pos = 0;
    while (pos <= text.size())
    {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = Trim(line);
        if (line.empty())
        {
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError("", fmt::format("line {}: expected 'key = value'", lineNo));
        }
        std::string key(Trim(line.substr(0, eq)));
        std::string value(Trim(line.substr(eq + 1)));
        if (!seen.insert(key).second)
        {
            throw ConfigError(key, fmt::format("line {}: duplicate key", lineNo));
        }
        if (key == "preset")
        {
            presets = value;
        }
        else
        {
            entries.emplace_back(std::move(key), std::move(value));
        }
    }
    ScenarioConfig cfg;
    if (presets)
    {
        cfg.ApplyPresets(*presets);
    }
    for (const auto& [k, v] : entries)
    {
        if (FindKey(k) == nullptr)
        {
            throw ConfigError(k, "unknown key");
        }
        cfg.m_values[k] = Canonical(*FindKey(k), v);
    }
    cfg.CheckConsistency();
    return cfg;
}

ScenarioConfig
ScenarioConfig::Load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("", fmt::format("cannot read scenario file {}", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return Parse(buf.str());
}

std::string
ScenarioConfig::Serialize() const
{
    std::string out;
    for (const auto& [k, v] : m_values)
    {
        out += fmt::format("{} = {}\n", k, v);
    }
    return out;
}

int64_t
ScenarioConfig::Int(const std::string& key) const
{
    const KeySpec* spec = FindKey(key);
    if (spec == nullptr || spec->type != KeyType::Int)
    {
        throw ConfigError(key, "not an integer key");
    }
    return std::stoll(m_values.at(key));
}

double
ScenarioConfig::Real(const std::string& key) const
{
    const KeySpec* spec = FindKey(key);
    if (spec == nullptr || spec->type == KeyType::Choice)
    {
        throw ConfigError(key, "not a numeric key");
    }
    return std::stod(m_values.at(key));
}

const std::string&
ScenarioConfig::Text(const std::string& key) const
{
    auto it = m_values.find(key);
    if (it == m_values.end())
    {
        throw ConfigError(key, "unknown key");
    }
    return it->second;
}

} // namespace uavsim
