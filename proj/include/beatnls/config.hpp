#pragma once

/// @file config.hpp
/// @brief Run configuration: key schema, config files and flag precedence.
///
/// Every subcommand owns a fixed set of documented keys. Values arrive as
/// strings from three layers (defaults, config file, command-line flags) and
/// later layers win. Unknown keys are rejected at every layer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beatnls/fixtures.hpp"
#include "beatnls/numeric.hpp"
#include "beatnls/rng.hpp"

namespace beatnls::cli {

enum class Kind { real, integer, boolean, text, real_list, choice };

/// Admissible range checked at parse time; richer domain constraints are
/// checked when the domain objects are built.
enum class Range { any, positive, nonneg, at_least_one, at_least_two, unit_open };

struct KeySpec {
    std::string name;
    Kind kind;
    std::string def;
    std::string doc;
    Range range = Range::any;
    std::vector<std::string> choices{};
};

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"branches", "rate", "collisions", "mu",       "dynamics",
                                                "pde",      "tail", "ldp-sweep",  "verify"};
    return names;
}

inline std::vector<KeySpec> common_keys(const std::string& sub) {
    return {
        {"seed", Kind::integer, std::to_string(kDefaultSeed), "RNG seed for stochastic estimators", Range::nonneg},
        {"format", Kind::choice, sub == "verify" ? "json" : "csv", "output format", Range::any, {"csv", "json"}},
        {"out", Kind::text, "-", "output path, '-' for stdout"},
        {"workers", Kind::integer, "1", "worker threads for Monte Carlo", Range::at_least_one},
    };
}

namespace detail {

inline std::vector<KeySpec> initial_data_keys(const std::string& eps_default) {
    return {
        {"alpha-re", Kind::real, "1", "Re alpha"},
        {"alpha-im", Kind::real, "0", "Im alpha"},
        {"beta-re", Kind::real, "0", "Re beta"},
        {"beta-im", Kind::real, "0", "Im beta"},
        {"eps", Kind::real, eps_default, "amplitude scale", Range::positive},
    };
}

inline std::vector<KeySpec> regime_keys() {
    return {
        {"z0", Kind::real, "1", "threshold z0", Range::positive},
        {"delta", Kind::real, "0.3", "scaling exponent delta in (0,1)"},
        {"gamma", Kind::real, "0", "time exponent, t = c_time*eps^-gamma"},
        {"c-time", Kind::real, "1", "time prefactor", Range::positive},
        {"cutoff-c", Kind::real, "10", "domain cutoff c >= 10*z0", Range::positive},
        {"c2", Kind::real, format_17(fixtures::kC2), "threshold correction lambda = z0 - c2*eps^((1-delta)/2)",
         Range::nonneg},
        {"sigma-a2", Kind::real, "2", "E|alpha|^2", Range::positive},
        {"sigma-b2", Kind::real, "1", "E|beta|^2", Range::positive},
        {"n", Kind::integer, "1000000", "Monte Carlo sample count", Range::at_least_one},
        {"theta", Kind::real, "-1", "importance-sampling tilt in [0,1); negative selects the default"},
    };
}

}  // namespace detail

/// Keys specific to one subcommand (the common keys are added separately).
inline std::vector<KeySpec> subcommand_keys(const std::string& sub) {
    using detail::initial_data_keys;
    if (sub == "branches") {
        return {
            {"z0", Kind::real, "1", "threshold lambda", Range::positive},
            {"tau-min", Kind::real, "0.01", "first grid point, in units of 1/z0^2", Range::positive},
            {"tau-max", Kind::real, "20", "last grid point, in units of 1/z0^2", Range::positive},
            {"samples", Kind::integer, "1000", "grid points", Range::at_least_two},
        };
    }
    if (sub == "rate") {
        return {
            {"z0", Kind::real, "1", "threshold z0", Range::positive},
            {"tau-min", Kind::real, "0.0001", "first grid point", Range::positive},
            {"tau-max", Kind::real, "10", "last grid point", Range::positive},
            {"samples", Kind::integer, "1000", "grid points", Range::at_least_two},
            {"grid", Kind::choice, "linear", "grid spacing", Range::any, {"linear", "log"}},
        };
    }
    if (sub == "collisions") {
        return {
            {"z0", Kind::real, "1", "threshold lambda", Range::positive},
            {"j-min", Kind::integer, "1", "first collision index", Range::at_least_one},
            {"j-max", Kind::integer, "100", "last collision index", Range::at_least_one},
        };
    }
    if (sub == "mu") {
        return {
            {"j", Kind::integer, "100", "collision index", Range::at_least_two},
            {"zeta-points", Kind::integer, "33", "zeta grid on [-pi, pi]", Range::at_least_two},
        };
    }
    if (sub == "dynamics") {
        auto k = initial_data_keys("0.1");
        k.push_back({"t-end", Kind::real, "1000", "final time", Range::nonneg});
        k.push_back({"dt", Kind::real, "0.01", "RK4 step", Range::positive});
        k.push_back({"stride", Kind::integer, "100", "steps between emitted rows", Range::at_least_one});
        return k;
    }
    if (sub == "pde") {
        auto k = initial_data_keys("0.1");
        k.push_back({"modes", Kind::integer, "64", "Fourier modes N (power of two)", Range::at_least_two});
        k.push_back({"dt", Kind::real, "0.001", "Strang step", Range::positive});
        k.push_back({"t-end", Kind::real, "100", "final time", Range::nonneg});
        k.push_back({"dealias", Kind::boolean, "true", "2/3-rule dealiasing"});
        k.push_back({"coupling", Kind::real, "4", "nonlinear coupling g in i u_t + u_xx = g cos(2x)|u|^2 u"});
        k.push_back({"sample-every", Kind::integer, "100", "steps between emitted rows", Range::at_least_one});
        k.push_back({"checkpoint", Kind::text, "", "write the final state to this path"});
        return k;
    }
    if (sub == "tail") {
        auto k = detail::regime_keys();
        k.push_back({"eps", Kind::real, "0.1", "amplitude scale", Range::unit_open});
        k.push_back({"method", Kind::choice, "quadrature", "estimator", Range::any,
                     {"quadrature", "monte_carlo", "closed_form"}});
        return k;
    }
    if (sub == "ldp-sweep") {
        auto k = detail::regime_keys();
        k.push_back({"eps-list", Kind::real_list, "0.3,0.1,0.03,0.01", "strictly decreasing eps values"});
        k.push_back({"method", Kind::choice, "quadrature", "estimator", Range::any, {"quadrature", "monte_carlo"}});
        return k;
    }
    if (sub == "verify") {
        return {
            {"suite", Kind::choice, "all", "invariant suite to run", Range::any,
             {"all", "implicit-curve", "effective-dynamics", "spectral-pde", "tail-probability", "cli-harness"}},
        };
    }
    throw ValidationError("unknown subcommand '" + sub + "'");
}

inline std::vector<KeySpec> all_keys(const std::string& sub) {
    auto k = common_keys(sub);
    auto s = subcommand_keys(sub);
    k.insert(k.end(), s.begin(), s.end());
    return k;
}

inline std::optional<KeySpec> find_key(const std::string& sub, const std::string& name) {
    for (auto& k : all_keys(sub)) {
        if (k.name == name) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Typed parsing

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw ValidationError(key + ": expected a number, got '" + v + "'");
    }
    if (pos != t.size() || !std::isfinite(x)) throw ValidationError(key + ": expected a finite number, got '" + v + "'");
    return x;
}

inline std::int64_t parse_integer(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(t, &pos);
    } catch (const std::exception&) {
        // Accept integral values written in floating notation, e.g. 1e6.
        const double d = parse_real(key, v);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ValidationError(key + ": expected an integer, got '" + v + "'");
        return static_cast<std::int64_t>(d);
    }
    if (pos != t.size()) {
        const double d = parse_real(key, v);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ValidationError(key + ": expected an integer, got '" + v + "'");
        return static_cast<std::int64_t>(d);
    }
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ValidationError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) throw ValidationError(key + ": expected a comma-separated list of numbers");
    return out;
}

/// Parses `value` as the key's type, checks its range and returns the
/// normalized string form.
inline std::string normalize(const KeySpec& k, const std::string& value) {
    auto range_error = [&](const std::string& what) {
        throw ValidationError(k.name + " must be " + what + ", got '" + value + "'");
    };
    switch (k.kind) {
        case Kind::real: {
            const double x = parse_real(k.name, value);
            if (k.range == Range::positive && !(x > 0.0)) range_error("> 0");
            if (k.range == Range::nonneg && !(x >= 0.0)) range_error(">= 0");
            if (k.range == Range::unit_open && !(x > 0.0 && x < 1.0)) range_error("in (0,1)");
            return format_17(x);
        }
        case Kind::integer: {
            const auto x = parse_integer(k.name, value);
            if (k.range == Range::positive && x <= 0) range_error("> 0");
            if (k.range == Range::nonneg && x < 0) range_error(">= 0");
            if (k.range == Range::at_least_one && x < 1) range_error(">= 1");
            if (k.range == Range::at_least_two && x < 2) range_error(">= 2");
            return std::to_string(x);
        }
        case Kind::boolean: return parse_bool(k.name, value) ? "true" : "false";
        case Kind::text: return value;
        case Kind::real_list: {
            std::string s;
            for (double x : parse_real_list(k.name, value)) {
                if (!(x > 0.0)) range_error("a list of positive numbers");
                if (!s.empty()) s += ",";
                s += format_17(x);
            }
            return s;
        }
        case Kind::choice: {
            const std::string t = trim(value);
            if (std::find(k.choices.begin(), k.choices.end(), t) == k.choices.end()) {
                std::string opts;
                for (auto& c : k.choices) opts += (opts.empty() ? "" : "|") + c;
                throw ValidationError(k.name + " must be one of " + opts + ", got '" + value + "'");
            }
            return t;
        }
    }
    return value;
}

// ---------------------------------------------------------------------------
// RunConfig

struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> params;  ///< subcommand keys, normalized
    std::uint64_t seed = kDefaultSeed;
    std::string out_path = "-";
    std::string format = "csv";
    int workers = 1;

    [[nodiscard]] const std::string& raw(const std::string& key) const {
        const auto it = params.find(key);
        if (it == params.end()) throw ValidationError("key '" + key + "' is not defined for " + subcommand);
        return it->second;
    }
    [[nodiscard]] double real(const std::string& key) const { return parse_real(key, raw(key)); }
    [[nodiscard]] std::int64_t integer(const std::string& key) const { return parse_integer(key, raw(key)); }
    [[nodiscard]] bool boolean(const std::string& key) const { return parse_bool(key, raw(key)); }
    [[nodiscard]] std::vector<double> real_list(const std::string& key) const { return parse_real_list(key, raw(key)); }
    [[nodiscard]] const std::string& text(const std::string& key) const { return raw(key); }
};

/// Flat key/value layer as read from a file or the command line.
using Layer = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
inline Layer parse_key_value_text(const std::string& text) {
    Layer out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        if (out.count(key)) throw ValidationError("config key '" + key + "' given twice");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::string json_scalar_to_string(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_float()) return format_17(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (auto& e : v) {
            if (e.is_array() || e.is_object()) throw ValidationError("config key '" + key + "': nested arrays are not allowed");
            if (!s.empty()) s += ",";
            s += json_scalar_to_string(key, e);
        }
        return s;
    }
    throw ValidationError("config key '" + key + "': unsupported JSON value");
}

/// Top-level members of an emitted report besides "config".
inline const std::vector<std::string>& report_sections() {
    static const std::vector<std::string> s{"fixtures", "tables", "summary", "status", "checks"};
    return s;
}

/// A flat JSON object of scalars and lists, or an emitted report whose
/// "config" member holds such an object.
inline Layer parse_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config JSON does not parse: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config JSON must be an object");
    if (j.contains("config")) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& secs = report_sections();
            if (it.key() != "config" && std::find(secs.begin(), secs.end(), it.key()) == secs.end()) {
                throw ValidationError("unknown report member '" + it.key() + "'");
            }
        }
        j = j["config"];
        if (!j.is_object()) throw ValidationError("report member 'config' must be an object");
    }
    Layer out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object()) throw ValidationError("config key '" + it.key() + "': nested objects are not allowed");
        out[it.key()] = json_scalar_to_string(it.key(), it.value());
    }
    return out;
}

inline Layer load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_text(text);
    return parse_key_value_text(text);
}

/// Resolves defaults < file < flags for one subcommand and validates the result.
inline RunConfig resolve_config(const std::string& sub, const Layer& file, const Layer& flags) {
    const auto keys = all_keys(sub);
    Layer merged;
    for (auto& k : keys) merged[k.name] = k.def;
    for (const Layer* layer : {&file, &flags}) {
        for (auto& [key, value] : *layer) {
            if (key == "subcommand") {
                if (trim(value) != sub) {
                    throw ValidationError("config file is for subcommand '" + value + "', not '" + sub + "'");
                }
                continue;
            }
            if (!find_key(sub, key)) throw ValidationError("unknown key '" + key + "' for subcommand " + sub);
            merged[key] = value;
        }
    }
    RunConfig cfg;
    cfg.subcommand = sub;
    for (auto& k : keys) {
        const std::string v = normalize(k, merged[k.name]);
        if (k.name == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_integer("seed", v));
        } else if (k.name == "format") {
            cfg.format = v;
        } else if (k.name == "out") {
            cfg.out_path = v;
        } else if (k.name == "workers") {
            cfg.workers = static_cast<int>(parse_integer("workers", v));
        } else {
            cfg.params[k.name] = v;
        }
    }
    return cfg;
}

/// Echo of a configuration as a flat JSON object that resolve_config accepts.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["subcommand"] = cfg.subcommand;
    j["seed"] = cfg.seed;
    j["format"] = cfg.format;
    j["out"] = cfg.out_path;
    j["workers"] = cfg.workers;
    for (auto& k : subcommand_keys(cfg.subcommand)) {
        const std::string& v = cfg.raw(k.name);
        switch (k.kind) {
            case Kind::real: j[k.name] = parse_real(k.name, v); break;
            case Kind::integer: j[k.name] = parse_integer(k.name, v); break;
            case Kind::boolean: j[k.name] = parse_bool(k.name, v); break;
            case Kind::real_list: j[k.name] = parse_real_list(k.name, v); break;
            case Kind::text:
            case Kind::choice: j[k.name] = v; break;
        }
    }
    return j;
}

}  // namespace beatnls::cli
