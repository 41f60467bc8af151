#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavsim {

/// Validation failure; what() names the offending key (or line).
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, const std::string& message);
    const std::string& Key() const { return m_key; }

  private:
    std::string m_key;
};

enum class KeyType
{
    Int,
    Real,
    Choice,
};

struct KeySpec
{
    std::string name;
    KeyType type{KeyType::Real};
    std::string defaultValue;
    double min{0};
    double max{0};
    bool minExclusive{false};
    std::vector<std::string> choices;
};

/// Every accepted key with its default and range.
const std::vector<KeySpec>& ConfigSchema();

/// Named bundles of settings: no_load, high_load, low_distance, high_distance.
const std::map<std::string, std::map<std::string, std::string>>& Presets();

/**
 * Flat scenario configuration. Values are stored in canonical text form, so
 * Serialize(Parse(x)) is a fixed point.
 */
class ScenarioConfig
{
  public:
    /// All defaults.
    ScenarioConfig();

    /// `key = value` lines, `#` comments. Presets named by the `preset` key
    /// (comma separated) are applied first; explicit keys override them.
    static ScenarioConfig Parse(std::string_view text);
    static ScenarioConfig Load(const std::string& path);

    /// Validates and stores one value. `preset` expands its bundles.
    void Set(const std::string& key, const std::string& value);
    std::string Serialize() const;

    int64_t Int(const std::string& key) const;
    double Real(const std::string& key) const;
    const std::string& Text(const std::string& key) const;

  private:
    void ApplyPresets(const std::string& list);
    void CheckConsistency() const;

    std::map<std::string, std::string> m_values;
};

} // namespace uavsim
