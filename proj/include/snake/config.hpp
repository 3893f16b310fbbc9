#pragma once

// Sectioned key=value experiment configuration:
//
//   # comment
//   [section]
//   key = value
//
// Unknown sections or keys are rejected in strict mode and reported as
// warnings otherwise. Every error names the offending line.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "snake/contour.hpp"
#include "snake/dynamics.hpp"
#include "snake/potential.hpp"

namespace snake {

enum class ExperimentKind { evolve, certify, modal, capture };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::evolve: return "evolve";
        case ExperimentKind::certify: return "certify";
        case ExperimentKind::modal: return "modal";
        case ExperimentKind::capture: return "capture";
    }
    return "unknown";
}

struct FieldConfig {
    std::string type = "quadratic";  ///< quadratic | gaussian | annulus | pgm
    SyntheticSpec synthetic{};
    std::filesystem::path path;      ///< pgm
    std::string mode = "edge";       ///< pgm: edge | intensity
    double sigma = 0.0;
    double spacing = 1.0;
};

struct ContourConfig {
    std::string source = "circle";  ///< circle | line | csv
    std::filesystem::path path;
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
    int count = 16;
    Vec2 start = Vec2::Zero();
    Vec2 end = Vec2(1.0, 0.0);
};

struct CaptureConfig {
    Vec2 velocity = Vec2::Zero();  ///< applied to every free point
    bool verify = true;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::evolve;
    FieldConfig field;
    std::optional<ContourConfig> contour;
    SnakeParams params;
    std::optional<Region> region;
    double grid_step = 0.0;  ///< 0 selects the field default
    int diagnostic_N = 64;
    std::optional<StopSpec> stop;
    long max_iter = 10000;
    CaptureConfig capture;
    Vec2 initial_velocity = Vec2::Zero();  ///< evolve: applied to every free point
    std::filesystem::path output_dir = "out";
    bool render = false;
    std::vector<std::string> warnings;
};

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class ConfigReader {
public:
    ConfigReader(std::istream& is, std::string name) : name_(std::move(name)) {
        std::string raw;
        int lineno = 0;
        std::string section;
        while (std::getline(is, raw)) {
            ++lineno;
            std::string line = raw;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "malformed section header '" + line + "'");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) fail(lineno, "empty section name");
                if (sections_.count(section)) fail(lineno, "duplicate section [" + section + "]");
                sections_[section] = lineno;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
            if (section.empty()) fail(lineno, "key outside of any section");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            auto& sec = entries_[section];
            if (sec.count(key)) {
                fail(lineno, "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                                 std::to_string(sec[key].line) + ")");
            }
            sec[key] = ConfigEntry{value, lineno, false};
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(name_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

    [[noreturn]] void missing(const std::string& s, const std::string& k) const {
        const auto it = sections_.find(s);
        if (it == sections_.end()) throw ConfigError(name_ + ": missing required key '" + k + "' in [" + s + "]");
        fail(it->second, "missing required key '" + k + "' in [" + s + "]");
    }

    void require_section(const std::string& s, const std::string& why) const {
        if (!has_section(s)) throw ConfigError(name_ + ": missing required section [" + s + "] (" + why + ")");
    }

    ConfigEntry* find(const std::string& s, const std::string& k) {
        auto it = entries_.find(s);
        if (it == entries_.end()) return nullptr;
        auto jt = it->second.find(k);
        if (jt == it->second.end()) return nullptr;
        jt->second.used = true;
        return &jt->second;
    }

    std::string text(const std::string& s, const std::string& k) {
        ConfigEntry* e = find(s, k);
        if (!e) missing(s, k);
        return e->value;
    }

    std::optional<std::string> text_opt(const std::string& s, const std::string& k) {
        ConfigEntry* e = find(s, k);
        if (!e) return std::nullopt;
        return e->value;
    }

    double number(const std::string& s, const std::string& k, std::optional<double> fallback = std::nullopt) {
        ConfigEntry* e = find(s, k);
        if (!e) {
            if (fallback) return *fallback;
            missing(s, k);
        }
        return parse_number(*e, k);
    }

    long integer(const std::string& s, const std::string& k, std::optional<long> fallback = std::nullopt) {
        ConfigEntry* e = find(s, k);
        if (!e) {
            if (fallback) return *fallback;
            missing(s, k);
        }
        char* end = nullptr;
        const long v = std::strtol(e->value.c_str(), &end, 10);
        if (e->value.empty() || *end != '\0') fail(e->line, "key '" + k + "' expects an integer, got '" + e->value + "'");
        return v;
    }

    bool boolean(const std::string& s, const std::string& k, bool fallback) {
        ConfigEntry* e = find(s, k);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no") return false;
        fail(e->line, "key '" + k + "' expects true or false, got '" + e->value + "'");
    }

    std::vector<double> numbers(const std::string& s, const std::string& k, std::size_t count,
                                std::optional<std::vector<double>> fallback = std::nullopt) {
        ConfigEntry* e = find(s, k);
        if (!e) {
            if (fallback) return *fallback;
            missing(s, k);
        }
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string part;
        while (std::getline(ss, part, ',')) {
            ConfigEntry tmp{trim(part), e->line, true};
            out.push_back(parse_number(tmp, k));
        }
        if (out.size() != count) {
            fail(e->line, "key '" + k + "' expects " + std::to_string(count) + " comma-separated numbers");
        }
        return out;
    }

    Vec2 vec2(const std::string& s, const std::string& k, std::optional<Vec2> fallback = std::nullopt) {
        if (!find(s, k) && fallback) return *fallback;
        const auto v = numbers(s, k, 2);
        return Vec2(v[0], v[1]);
    }

    int line_of(const std::string& s, const std::string& k) {
        ConfigEntry* e = find(s, k);
        return e ? e->line : (has_section(s) ? sections_.at(s) : 0);
    }

    /// Lines of every section or key that no accessor consumed.
    std::vector<std::string> unknown(const std::set<std::string>& known_sections) const {
        std::vector<std::string> out;
        for (const auto& [sec, line] : sections_) {
            if (!known_sections.count(sec)) {
                out.push_back(name_ + ":" + std::to_string(line) + ": unknown section [" + sec + "]");
            }
        }
        for (const auto& [sec, keys] : entries_) {
            if (!known_sections.count(sec)) continue;
            for (const auto& [key, entry] : keys) {
                if (!entry.used) {
                    out.push_back(name_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "' in [" +
                                  sec + "]");
                }
            }
        }
        return out;
    }

private:
    double parse_number(const ConfigEntry& e, const std::string& k) const {
        char* end = nullptr;
        const double v = std::strtod(e.value.c_str(), &end);
        if (e.value.empty() || *end != '\0' || !std::isfinite(v)) {
            fail(e.line, "key '" + k + "' expects a finite number, got '" + e.value + "'");
        }
        return v;
    }

    std::string name_;
    std::map<std::string, int> sections_;
    std::map<std::string, std::map<std::string, ConfigEntry>> entries_;
};

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is, const std::string& name = "config",
                                     const std::filesystem::path& base_dir = {}, bool strict = true) {
    detail::ConfigReader rd(is, name);
    ExperimentConfig cfg;

    rd.require_section("experiment", "kind");
    const std::string kind = rd.text("experiment", "kind");
    if (kind == "evolve") cfg.kind = ExperimentKind::evolve;
    else if (kind == "certify") cfg.kind = ExperimentKind::certify;
    else if (kind == "modal") cfg.kind = ExperimentKind::modal;
    else if (kind == "capture") cfg.kind = ExperimentKind::capture;
    else rd.fail(rd.line_of("experiment", "kind"), "unknown experiment kind '" + kind + "'");

    const bool needs_contour = cfg.kind != ExperimentKind::certify;
    const bool needs_params = cfg.kind != ExperimentKind::certify;
    const bool needs_region = cfg.kind == ExperimentKind::certify || cfg.kind == ExperimentKind::capture;
    const bool needs_stop = cfg.kind == ExperimentKind::evolve || cfg.kind == ExperimentKind::capture;

    rd.require_section("field", "every experiment needs a potential");
    FieldConfig& f = cfg.field;
    f.type = rd.text("field", "type");
    if (f.type == "pgm") {
        f.path = base_dir / rd.text("field", "path");
        f.mode = rd.text_opt("field", "mode").value_or("edge");
        if (f.mode != "edge" && f.mode != "intensity") {
            rd.fail(rd.line_of("field", "mode"), "field mode must be edge or intensity");
        }
        f.sigma = rd.number("field", "sigma", 0.0);
        f.spacing = rd.number("field", "spacing", 1.0);
        if (!std::filesystem::exists(f.path)) {
            rd.fail(rd.line_of("field", "path"), "image '" + f.path.string() + "' not found");
        }
    } else {
        SyntheticSpec& s = f.synthetic;
        if (f.type == "quadratic") s.kind = FieldKind::quadratic;
        else if (f.type == "gaussian") s.kind = FieldKind::gaussian;
        else if (f.type == "annulus") s.kind = FieldKind::annulus;
        else rd.fail(rd.line_of("field", "type"), "unknown field type '" + f.type + "'");
        s.center = rd.vec2("field", "center", Vec2::Zero());
        if (s.kind != FieldKind::gaussian) s.k = rd.number("field", "k", 1.0);
        if (s.kind == FieldKind::gaussian) {
            s.amplitude = rd.number("field", "amplitude", 1.0);
            s.width = rd.number("field", "width", 1.0);
        }
        if (s.kind == FieldKind::annulus) s.radius = rd.number("field", "radius", 1.0);
        const auto d = rd.numbers("field", "domain", 4, std::vector<double>{-10, -10, 10, 10});
        s.domain = Domain{Vec2(d[0], d[1]), Vec2(d[2], d[3])};
    }

    if (needs_contour) {
        rd.require_section("contour", "needed by kind " + kind);
        ContourConfig c;
        c.source = rd.text("contour", "source");
        if (c.source == "circle") {
            c.center = rd.vec2("contour", "center", Vec2::Zero());
            c.radius = rd.number("contour", "radius");
            c.count = static_cast<int>(rd.integer("contour", "count"));
        } else if (c.source == "line") {
            c.start = rd.vec2("contour", "start");
            c.end = rd.vec2("contour", "end");
            c.count = static_cast<int>(rd.integer("contour", "count"));
        } else if (c.source == "csv") {
            c.path = base_dir / rd.text("contour", "path");
            if (!std::filesystem::exists(c.path)) {
                rd.fail(rd.line_of("contour", "path"), "contour file '" + c.path.string() + "' not found");
            }
        } else {
            rd.fail(rd.line_of("contour", "source"), "contour source must be circle, line or csv");
        }
        cfg.contour = c;
    }

    if (needs_params) rd.require_section("params", "needed by kind " + kind);
    if (rd.has_section("params")) {
        SnakeParams& p = cfg.params;
        p.omega1 = rd.number("params", "omega1", 0.0);
        p.omega2 = rd.number("params", "omega2", 0.0);
        p.mu = rd.number("params", "mu", 1.0);
        p.gamma = rd.number("params", "gamma", 0.0);
        p.tau = rd.number("params", "tau", 0.1);
        try {
            p.validate();
        } catch (const InvalidSpecError& e) {
            rd.fail(rd.line_of("params", "mu"), e.what());
        }
    }

    if (needs_region) rd.require_section("region", "needed by kind " + kind);
    if (rd.has_section("region")) {
        const std::string shape = rd.text("region", "shape");
        const int samples = static_cast<int>(rd.integer("region", "samples", 64));
        if (shape == "disk") {
            cfg.region = Region::disk(rd.vec2("region", "center"), rd.number("region", "radius"), samples);
        } else if (shape == "rectangle") {
            cfg.region = Region::rectangle(rd.vec2("region", "min"), rd.vec2("region", "max"), samples);
        } else {
            rd.fail(rd.line_of("region", "shape"), "region shape must be disk or rectangle");
        }
        cfg.grid_step = rd.number("region", "grid_step", 0.0);
        cfg.diagnostic_N = static_cast<int>(rd.integer("region", "diagnostic_N", 64));
    }

    if (needs_stop) rd.require_section("stop", "needed by kind " + kind);
    if (rd.has_section("stop")) {
        StopSpec s;
        const std::string crit = rd.text_opt("stop", "criterion").value_or("steady-state");
        if (crit == "steady-state") s.criterion = StopCriterion::steady_state;
        else if (crit == "steady-support") s.criterion = StopCriterion::steady_support;
        else if (crit == "both") s.criterion = StopCriterion::both;
        else if (crit == "none") s.criterion = StopCriterion::none;
        else rd.fail(rd.line_of("stop", "criterion"), "criterion must be steady-state, steady-support, both or none");
        s.epsilon = rd.number("stop", "epsilon", 1e-8);
        cfg.max_iter = rd.integer("stop", "max_iter", 10000);
        if (cfg.max_iter < 0) rd.fail(rd.line_of("stop", "max_iter"), "max_iter must be >= 0");
        cfg.stop = s;
    }

    if (rd.has_section("initial")) cfg.initial_velocity = rd.vec2("initial", "velocity", Vec2::Zero());
    if (rd.has_section("capture")) {
        cfg.capture.velocity = rd.vec2("capture", "velocity", Vec2::Zero());
        cfg.capture.verify = rd.boolean("capture", "verify", true);
    }
    if (rd.has_section("output")) {
        if (auto dir = rd.text_opt("output", "dir")) cfg.output_dir = base_dir / *dir;
        cfg.render = rd.boolean("output", "render", false);
    } else {
        cfg.output_dir = base_dir / "out";
    }

    const auto unknown = rd.unknown({"experiment", "field", "contour", "params", "region", "stop", "initial",
                                     "capture", "output"});
    if (!unknown.empty()) {
        if (strict) throw ConfigError(unknown.front());
        cfg.warnings = unknown;
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, bool strict = true) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    return parse_config(in, path.string(), path.parent_path(), strict);
}

}  // namespace snake
