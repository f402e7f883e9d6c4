#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "params.hpp"

namespace hetbel {

/// Bad config text, unknown key or unparsable value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { Paths, WelfareSweep, DoubleLoss, Strategist, Survival, TwoState, CriticalZeta };

inline const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Paths: return "paths";
        case Experiment::WelfareSweep: return "welfare-sweep";
        case Experiment::DoubleLoss: return "double-loss";
        case Experiment::Strategist: return "strategist";
        case Experiment::Survival: return "survival";
        case Experiment::TwoState: return "two-state";
        case Experiment::CriticalZeta: return "critical-zeta";
    }
    return "?";
}

inline Experiment parse_experiment(std::string_view s) {
    for (auto e : {Experiment::Paths, Experiment::WelfareSweep, Experiment::DoubleLoss, Experiment::Strategist,
                   Experiment::Survival, Experiment::TwoState, Experiment::CriticalZeta})
        if (s == experiment_name(e)) return e;
    throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

struct ExperimentConfig {
    Experiment experiment = Experiment::CriticalZeta;
    ModelParams model;
    SimGrid grid;
    TwoStateParams two_state = TwoStateParams::realistic();
    std::vector<double> zetas;   ///< empty: the experiment's own default list
    std::vector<double> e_R;     ///< empty: the experiment's own default grid
    std::size_t strategist_points = 41;
    double strategist_half_width = 5.0;
    double survival_T = 300.0;
    std::size_t survival_probes = 100;
    double counterexample_T = 0.2;
    double counterexample_dt = 1e-4;
    std::vector<double> rho_list{0.1, 0.02, 0.004};
    std::string out = "out";
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
        throw ConfigError("key '" + key + "': not a non-negative integer: '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("key '" + key + "': not a boolean: '" + s + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

struct ConfigKey {
    const char* name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define HETBEL_DOUBLE_KEY(NAME, FIELD)                                                    \
    ConfigKey {                                                                           \
        NAME, [](const ExperimentConfig& c) { return format_double(c.FIELD); },           \
            [](ExperimentConfig& c, const std::string& v) { c.FIELD = parse_double(NAME, v); } \
    }

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"experiment", [](const ExperimentConfig& c) { return std::string(experiment_name(c.experiment)); },
         [](ExperimentConfig& c, const std::string& v) { c.experiment = parse_experiment(v); }},
        {"out", [](const ExperimentConfig& c) { return c.out; },
         [](ExperimentConfig& c, const std::string& v) { c.out = v; }},
        HETBEL_DOUBLE_KEY("model.mu_bar", model.mu_bar),
        HETBEL_DOUBLE_KEY("model.kappa", model.kappa),
        HETBEL_DOUBLE_KEY("model.sigma_mu", model.sigma_mu),
        HETBEL_DOUBLE_KEY("model.sigma_D", model.sigma_D),
        HETBEL_DOUBLE_KEY("model.sigma_e", model.sigma_e),
        HETBEL_DOUBLE_KEY("model.rho", model.rho),
        HETBEL_DOUBLE_KEY("model.zeta", model.zeta),
        HETBEL_DOUBLE_KEY("model.e_R", model.e_R),
        HETBEL_DOUBLE_KEY("model.mu0", model.mu0),
        HETBEL_DOUBLE_KEY("model.muR0", model.muR0),
        HETBEL_DOUBLE_KEY("model.muI0", model.muI0),
        HETBEL_DOUBLE_KEY("model.gammaR0", model.gammaR0),
        HETBEL_DOUBLE_KEY("model.gammaI0", model.gammaI0),
        {"model.init", [](const ExperimentConfig& c) {
             return std::string(c.model.init == InitMode::Stationary ? "stationary" : "fixed");
         },
         [](ExperimentConfig& c, const std::string& v) {
             if (v == "fixed") c.model.init = InitMode::Fixed;
             else if (v == "stationary") c.model.init = InitMode::Stationary;
             else throw ConfigError("key 'model.init': expected fixed or stationary, got '" + v + "'");
         }},
        HETBEL_DOUBLE_KEY("grid.dt", grid.dt),
        HETBEL_DOUBLE_KEY("grid.T", grid.T),
        {"grid.n_paths", [](const ExperimentConfig& c) { return std::to_string(c.grid.n_paths); },
         [](ExperimentConfig& c, const std::string& v) { c.grid.n_paths = parse_u64("grid.n_paths", v); }},
        {"grid.seed", [](const ExperimentConfig& c) { return std::to_string(c.grid.seed); },
         [](ExperimentConfig& c, const std::string& v) { c.grid.seed = parse_u64("grid.seed", v); }},
        HETBEL_DOUBLE_KEY("two_state.mu_h", two_state.mu_h),
        HETBEL_DOUBLE_KEY("two_state.mu_l", two_state.mu_l),
        HETBEL_DOUBLE_KEY("two_state.lambda_hl", two_state.lambda_hl),
        HETBEL_DOUBLE_KEY("two_state.psi_lh", two_state.psi_lh),
        HETBEL_DOUBLE_KEY("two_state.sigma_D", two_state.sigma_D),
        HETBEL_DOUBLE_KEY("two_state.sigma_e", two_state.sigma_e),
        HETBEL_DOUBLE_KEY("two_state.rho", two_state.rho),
        HETBEL_DOUBLE_KEY("two_state.zeta", two_state.zeta),
        HETBEL_DOUBLE_KEY("two_state.e_R", two_state.e_R),
        HETBEL_DOUBLE_KEY("two_state.mu0", two_state.mu0),
        HETBEL_DOUBLE_KEY("two_state.muR0", two_state.muR0),
        HETBEL_DOUBLE_KEY("two_state.muI0", two_state.muI0),
        {"two_state.stationary_start",
         [](const ExperimentConfig& c) { return std::string(c.two_state.stationary_start ? "true" : "false"); },
         [](ExperimentConfig& c, const std::string& v) {
             c.two_state.stationary_start = parse_bool("two_state.stationary_start", v);
         }},
        {"sweep.zeta", [](const ExperimentConfig& c) { return format_list(c.zetas); },
         [](ExperimentConfig& c, const std::string& v) { c.zetas = parse_list("sweep.zeta", v); }},
        {"sweep.e_R", [](const ExperimentConfig& c) { return format_list(c.e_R); },
         [](ExperimentConfig& c, const std::string& v) { c.e_R = parse_list("sweep.e_R", v); }},
        {"strategist.points", [](const ExperimentConfig& c) { return std::to_string(c.strategist_points); },
         [](ExperimentConfig& c, const std::string& v) { c.strategist_points = parse_u64("strategist.points", v); }},
        HETBEL_DOUBLE_KEY("strategist.half_width", strategist_half_width),
        HETBEL_DOUBLE_KEY("survival.T", survival_T),
        {"survival.probes", [](const ExperimentConfig& c) { return std::to_string(c.survival_probes); },
         [](ExperimentConfig& c, const std::string& v) { c.survival_probes = parse_u64("survival.probes", v); }},
        HETBEL_DOUBLE_KEY("counterexample.T", counterexample_T),
        HETBEL_DOUBLE_KEY("counterexample.dt", counterexample_dt),
        {"critical.rho", [](const ExperimentConfig& c) { return format_list(c.rho_list); },
         [](ExperimentConfig& c, const std::string& v) { c.rho_list = parse_list("critical.rho", v); }},
    };
    return keys;
}

#undef HETBEL_DOUBLE_KEY

}  // namespace detail

/// Applies one `key = value` assignment.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    for (const auto& k : detail::config_keys())
        if (key == k.name) {
            k.set(c, value);
            return;
        }
    throw ConfigError("unknown config key '" + key + "'");
}

/// Parses `key = value` text on top of `base`. Blank lines and `#` comments are skipped.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {}) {
    std::stringstream ss{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        set_config_value(base, key, detail::trim(std::string_view(t).substr(eq + 1)));
    }
    return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

/// Every key in canonical order, one per line.
inline std::string serialize_config(const ExperimentConfig& c) {
    std::string s;
    for (const auto& k : detail::config_keys()) s += std::string(k.name) + " = " + k.get(c) + "\n";
    return s;
}

}  // namespace hetbel
