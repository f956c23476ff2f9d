#include "torusdyn/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace torusdyn::harness {

const std::vector<std::string> kCommands = {"rotset", "vrotset",      "find-periodic", "grow",
                                            "scan-translates", "confinement", "omega-probe",
                                            "disks", "mixing", "sft-hull", "sft-orbit", "check-all"};

const std::vector<SectionSpec>& config_schema() {
    using T = ValueType;
    static const std::vector<SectionSpec> schema = {
        {"map",
         {{"map", T::choice, "", {"standard", "custom"}},
          {"k", T::real, "0", {}},
          {"epsilon", T::real, "0", {}},
          {"builtin", T::choice, "identity", {"identity", "translation", "drift_saddle", "linear_saddle"}},
          {"a", T::real, "0", {}},
          {"b", T::real, "0", {}},
          {"lu", T::real, "2", {}},
          {"ls", T::real, "0.5", {}}}},
        {"run",
         {{"command", T::choice, "", kCommands},
          {"seed", T::integer, "1", {}}}},
        {"rotation",
         {{"grid_nx", T::integer, "64", {}},
          {"grid_ny", T::integer, "64", {}},
          {"xmin", T::real, "0", {}},
          {"xmax", T::real, "1", {}},
          {"ymin", T::real, "0", {}},
          {"ymax", T::real, "1", {}},
          {"short_horizon", T::integer, "1000", {}},
          {"long_horizon", T::integer, "10000", {}}}},
        {"periodic",
         {{"period", T::integer, "1", {}},
          {"p", T::integer, "0", {}},
          {"r", T::integer, "0", {}},
          {"grid", T::integer, "16", {}},
          {"jitter", T::real, "0", {}}}},
        {"manifold",
         {{"point_x", T::real, "0", {}},
          {"point_y", T::real, "0", {}},
          {"period", T::integer, "1", {}},
          {"p", T::integer, "0", {}},
          {"r", T::integer, "0", {}},
          {"arclength", T::real, "200", {}},
          {"h_max", T::real, "0.001", {}},
          {"delta_seed", T::real, "1e-06", {}},
          {"vertex_cap", T::integer, "2000000", {}},
          {"scan_min", T::integer, "-1", {}},
          {"scan_max", T::integer, "1", {}},
          {"closure_a", T::integer, "1", {}},
          {"closure_b", T::integer, "0", {}},
          {"closure_eps", T::real, "0.05", {}},
          {"region_xmin", T::real, "0", {}},
          {"region_xmax", T::real, "2", {}},
          {"region_ymin", T::real, "0", {}},
          {"region_ymax", T::real, "2", {}}}},
        {"confinement",
         {{"mode", T::choice, "south", {"south", "north", "theta"}},
          {"theta", T::real, "0", {}},
          {"theta_samples", T::integer, "8", {}},
          {"horizon", T::integer, "1000", {}},
          {"extra", T::integer, "10000", {}},
          {"xmin", T::real, "-4", {}},
          {"xmax", T::real, "4", {}},
          {"ymin", T::real, "-4", {}},
          {"ymax", T::real, "4", {}},
          {"step", T::real, "0.0078125", {}},
          {"sample_cap", T::integer, "4096", {}},
          {"threshold", T::real, "0.001", {}}}},
        {"disks",
         {{"xmin", T::real, "0", {}},
          {"xmax", T::real, "2", {}},
          {"ymin", T::real, "0", {}},
          {"ymax", T::real, "2", {}},
          {"step", T::real, "0.02", {}}}},
        {"mixing",
         {{"u_x", T::real, "0.25", {}},
          {"u_y", T::real, "0.25", {}},
          {"u_r", T::real, "0.2", {}},
          {"v_x", T::real, "0.75", {}},
          {"v_y", T::real, "0.75", {}},
          {"v_r", T::real, "0.2", {}},
          {"n_max", T::integer, "200", {}},
          {"samples", T::integer, "32", {}}}},
        {"sft",
         {{"graph", T::choice, "two_loops", {"two_loops", "triangle", "file"}},
          {"file", T::text, "-", {}},
          {"rho_x", T::rational, "1/2", {}},
          {"rho_y", T::rational, "1/2", {}},
          {"horizon", T::integer, "10000", {}},
          {"cycle_cap", T::integer, "10000", {}}}},
    };
    return schema;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const KeySpec* find_key(const SectionSpec& section, std::string_view key) {
    for (const auto& k : section.keys)
        if (k.key == key) return &k;
    return nullptr;
}

const SectionSpec* find_section(std::string_view name) {
    for (const auto& s : config_schema())
        if (s.name == name) return &s;
    return nullptr;
}

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_real(const std::string& s, double& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return std::isfinite(out);
    if (s.find('/') == std::string::npos) return false;
    try {
        out = to_double(parse_rational(s));
    } catch (const std::exception&) {
        return false;
    }
    return std::isfinite(out);
}

/// Canonical text of a raw value, or a ConfigError.
std::string canonical(const KeySpec& spec, const std::string& raw, int line, const std::string& section) {
    const std::string where = "[" + section + "] " + spec.key;
    switch (spec.type) {
        case ValueType::integer: {
            std::int64_t v = 0;
            if (!parse_int(raw, v)) throw ConfigError(line, where + " expects an integer, got '" + raw + "'");
            return std::to_string(v);
        }
        case ValueType::real: {
            double v = 0.0;
            if (!parse_real(raw, v)) throw ConfigError(line, where + " expects a real number, got '" + raw + "'");
            return format_real(v);
        }
        case ValueType::rational:
            try {
                return to_string(parse_rational(raw));
            } catch (const std::exception&) {
                throw ConfigError(line, where + " expects a rational such as 1/3, got '" + raw + "'");
            }
        case ValueType::text:
            if (raw.empty()) throw ConfigError(line, where + " expects a value");
            return raw;
        case ValueType::choice:
            if (std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end()) {
                std::string list;
                for (const auto& c : spec.choices) list += (list.empty() ? "" : "|") + c;
                throw ConfigError(line, where + " expects one of " + list + ", got '" + raw + "'");
            }
            return raw;
    }
    return raw;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    const SectionSpec* current = nullptr;
    std::map<std::string, int> section_line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        const std::string body = trim(cut == std::string::npos ? line : line.substr(0, cut));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(lineno, "malformed section header '" + body + "'");
            const std::string name = trim(body.substr(1, body.size() - 2));
            current = find_section(name);
            if (!current) throw ConfigError(lineno, "unknown section [" + name + "]");
            section_line.emplace(name, lineno);
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value', got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string raw = trim(body.substr(eq + 1));
        if (!current) throw ConfigError(lineno, "key '" + key + "' appears before any [section]");
        const KeySpec* spec = find_key(*current, key);
        if (!spec) throw ConfigError(lineno, "unknown key '" + key + "' in [" + current->name + "]");
        const std::string value = canonical(*spec, raw, lineno, current->name);
        auto& lines = cfg.lines_[current->name];
        if (const auto prev = lines.find(key); prev != lines.end())
            cfg.warnings_.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" +
                                    current->name + "] (first set on line " + std::to_string(prev->second) +
                                    "), last value wins");
        lines[key] = lineno;
        cfg.values_[current->name][key] = value;
    }

    const int end_line = std::max(lineno, 1);
    if (!section_line.count("map")) throw ConfigError(end_line, "missing [map] block");
    if (!cfg.given("map", "map"))
        throw ConfigError(section_line["map"], "[map] block needs 'map = standard' or 'map = custom'");
    if (!cfg.given("run", "command"))
        throw ConfigError(section_line.count("run") ? section_line["run"] : end_line,
                          "missing 'command' in [run]");

    for (const auto& section : config_schema())
        for (const auto& key : section.keys)
            if (!cfg.values_[section.name].count(key.key)) cfg.values_[section.name][key.key] = key.fallback;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError(0, "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << file.rdbuf();
    RunConfig cfg = parse_config(buf.str());
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

std::uint64_t RunConfig::seed() const { return std::uint64_t(integer("run", "seed")); }

const std::string& RunConfig::text(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end()) throw std::out_of_range("no config section " + section);
    const auto k = s->second.find(key);
    if (k == s->second.end()) throw std::out_of_range("no config key " + section + "." + key);
    return k->second;
}

std::int64_t RunConfig::integer(const std::string& section, const std::string& key) const {
    std::int64_t v = 0;
    if (!parse_int(text(section, key), v)) throw std::logic_error(section + "." + key + " is not an integer");
    return v;
}

double RunConfig::real(const std::string& section, const std::string& key) const {
    double v = 0.0;
    if (!parse_real(text(section, key), v)) throw std::logic_error(section + "." + key + " is not a real");
    return v;
}

Rational RunConfig::rational(const std::string& section, const std::string& key) const {
    return parse_rational(text(section, key));
}

bool RunConfig::given(const std::string& section, const std::string& key) const {
    const auto s = lines_.find(section);
    return s != lines_.end() && s->second.count(key) > 0;
}

int RunConfig::line_of(const std::string& section, const std::string& key) const {
    const auto s = lines_.find(section);
    if (s == lines_.end()) return 0;
    const auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    const SectionSpec* spec = find_section(section);
    const KeySpec* k = spec ? find_key(*spec, key) : nullptr;
    if (!k) throw ConfigError(0, "unknown key " + section + "." + key);
    values_[section][key] = canonical(*k, value, 0, section);
}

LiftedTorusMap build_map(const RunConfig& config) {
    if (config.text("map", "map") == "standard")
        return make_standard_map(config.real("map", "k"), config.real("map", "epsilon"));
    const std::string& builtin = config.text("map", "builtin");
    if (builtin == "translation") return make_translation_map(config.real("map", "a"), config.real("map", "b"));
    if (builtin == "drift_saddle") return make_drift_saddle(config.real("map", "a"), config.real("map", "b"));
    if (builtin == "linear_saddle") return make_linear_saddle(config.real("map", "lu"), config.real("map", "ls"));
    return make_identity_map();
}

}  // namespace torusdyn::harness
