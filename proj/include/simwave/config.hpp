#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "simwave/coefficients.hpp"
#include "simwave/errors.hpp"
#include "simwave/grid.hpp"

namespace simwave {

// Flat `key = value` experiment description.  Lines starting with '#' and
// blank lines are skipped; unknown keys are errors so typos cannot silently
// change an experiment.
struct ExperimentConfig {
    GeometrySpec geometry;
    MediumCoefficients coefficients;
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    double delta0 = 0.0;
    double c2 = std::numeric_limits<double>::quiet_NaN();  // NaN: estimate
    double T = 1.0;
    double cfl = 0.9;
    unsigned seed = 12345;
    double tolerance = 1e-8;
    long max_iter = 500;
    int trials = 3;
    std::string output_dir = "out";
    long snapshot_every = 0;
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "geometry.dimension", "geometry.bounds", "geometry.dx",
        "coefficients.alpha", "coefficients.beta", "coefficients.gamma", "coefficients.tau",
        "multiplier.x0", "multiplier.delta0", "multiplier.c2",
        "run.T", "run.cfl", "run.seed", "run.tolerance", "run.max_iter", "run.trials",
        "output.dir", "output.snapshot_every",
    };
    return keys;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double r;
    try {
        r = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("trailing characters in value for " + key);
    return r;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty element in list for " + key);
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        const auto& known = detail::known_keys();
        bool ok = false;
        for (const auto& k : known) ok = ok || (k == key);
        if (!ok) throw ConfigError("unknown config key: " + key);
        if (kv.count(key)) throw ConfigError("duplicate config key: " + key);
        kv[key] = value;
    }

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return (it == kv.end()) ? nullptr : &it->second;
    };
    auto need = [&](const char* key) -> const std::string& {
        const std::string* v = take(key);
        if (!v) throw ConfigError(std::string("missing required config key: ") + key);
        return *v;
    };

    cfg.geometry.dimension = static_cast<int>(detail::parse_double("geometry.dimension", need("geometry.dimension")));
    cfg.geometry.bounds = detail::parse_list("geometry.bounds", need("geometry.bounds"));
    cfg.geometry.spacing = detail::parse_double("geometry.dx", need("geometry.dx"));
    cfg.coefficients.alpha = detail::parse_list("coefficients.alpha", need("coefficients.alpha"));
    cfg.coefficients.beta = detail::parse_list("coefficients.beta", need("coefficients.beta"));
    cfg.coefficients.gamma = detail::parse_list("coefficients.gamma", need("coefficients.gamma"));
    cfg.coefficients.tau = detail::parse_list("coefficients.tau", need("coefficients.tau"));

    if (const std::string* v = take("multiplier.x0")) {
        std::vector<double> x0 = detail::parse_list("multiplier.x0", *v);
        if (static_cast<int>(x0.size()) != cfg.geometry.dimension)
            throw ConfigError("multiplier.x0 length must equal geometry.dimension");
        for (std::size_t i = 0; i < x0.size(); ++i) cfg.x0[i] = x0[i];
    } else if (cfg.geometry.dimension == 1 && !cfg.geometry.bounds.empty()) {
        cfg.x0[0] = cfg.geometry.bounds.front();
    }
    if (const std::string* v = take("multiplier.delta0"))
        cfg.delta0 = detail::parse_double("multiplier.delta0", *v);
    if (cfg.delta0 < 0.0) throw ConfigError("multiplier.delta0 must be nonnegative");
    if (const std::string* v = take("multiplier.c2")) {
        if (*v != "estimate") cfg.c2 = detail::parse_double("multiplier.c2", *v);
    }
    if (const std::string* v = take("run.T")) cfg.T = detail::parse_double("run.T", *v);
    if (!(cfg.T > 0.0)) throw ConfigError("run.T must be positive");
    if (const std::string* v = take("run.cfl")) cfg.cfl = detail::parse_double("run.cfl", *v);
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("run.cfl must lie in (0, 1]");
    if (const std::string* v = take("run.seed"))
        cfg.seed = static_cast<unsigned>(detail::parse_double("run.seed", *v));
    if (const std::string* v = take("run.tolerance"))
        cfg.tolerance = detail::parse_double("run.tolerance", *v);
    if (const std::string* v = take("run.max_iter"))
        cfg.max_iter = static_cast<long>(detail::parse_double("run.max_iter", *v));
    if (const std::string* v = take("run.trials"))
        cfg.trials = static_cast<int>(detail::parse_double("run.trials", *v));
    if (cfg.trials < 1) throw ConfigError("run.trials must be at least 1");
    if (const std::string* v = take("output.dir")) cfg.output_dir = *v;
    if (const std::string* v = take("output.snapshot_every"))
        cfg.snapshot_every = static_cast<long>(detail::parse_double("output.snapshot_every", *v));
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace simwave
