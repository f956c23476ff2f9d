#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "torusdyn/map.hpp"
#include "torusdyn/sft.hpp"

namespace torusdyn::harness {

/// Problem in the config text; line() is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class ValueType { integer, real, rational, text, choice };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string fallback;               ///< default in canonical form; empty means required
    std::vector<std::string> choices;   ///< for ValueType::choice
};

struct SectionSpec {
    std::string name;
    std::vector<KeySpec> keys;
};

/// Every section and key the tool understands, with defaults.
const std::vector<SectionSpec>& config_schema();

extern const std::vector<std::string> kCommands;

/// Fully resolved configuration: every schema key has a value.
class RunConfig {
public:
    std::string command() const { return text("run", "command"); }
    std::uint64_t seed() const;

    std::int64_t integer(const std::string& section, const std::string& key) const;
    double real(const std::string& section, const std::string& key) const;
    Rational rational(const std::string& section, const std::string& key) const;
    const std::string& text(const std::string& section, const std::string& key) const;
    /// True when the key was written in the config rather than defaulted.
    bool given(const std::string& section, const std::string& key) const;
    /// Line where the key was (last) set, 0 when defaulted.
    int line_of(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    /// Canonical values by section and key (std::map, so iteration is sorted).
    const std::map<std::string, std::map<std::string, std::string>>& values() const { return values_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Directory against which relative paths in the config resolve.
    std::string base_dir;

private:
    friend RunConfig parse_config(std::string_view text);
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::map<std::string, std::map<std::string, int>> lines_;
    std::vector<std::string> warnings_;
};

/// Parses `key = value` lines under `[section]` headers. `#` and `;` start
/// comments. Unknown keys or sections, malformed values and a missing [map]
/// block raise ConfigError with the line number; a repeated key keeps the
/// last value and records a warning.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Builds the lifted map described by the [map] block.
LiftedTorusMap build_map(const RunConfig& config);

}  // namespace torusdyn::harness
