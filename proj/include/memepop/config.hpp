#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "memepop/analytic.hpp"
#include "memepop/error.hpp"
#include "memepop/simulator.hpp"

namespace memepop {

// `key = value` lines; `#` starts a comment. A value may be a comma-separated list (sweeps).
using ConfigMap = std::map<std::string, std::vector<std::string>>;

namespace detail {

inline std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw DomainError(key + ": not a number: '" + v + "'");
    }
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int x{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) throw DomainError(key + ": not an integer: '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DomainError(key + ": not a boolean: '" + v + "'");
}

} // namespace detail

inline ConfigMap parse_config(std::istream& in) {
    ConfigMap cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (cfg.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
        std::vector<std::string> values;
        std::stringstream rest(line.substr(eq + 1));
        std::string item;
        while (std::getline(rest, item, ',')) values.push_back(detail::trim(item));
        if (values.empty() || values.front().empty()) throw ParseError(lineno, "missing value for '" + key + "'");
        for (const auto& v : values)
            if (v.empty()) throw ParseError(lineno, "empty list item for '" + key + "'");
        cfg.emplace(key, std::move(values));
    }
    return cfg;
}

inline void check_keys(const ConfigMap& cfg, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : cfg)
        if (!allowed.count(k)) throw DomainError(k + ": unknown configuration key");
}

inline const std::string& single(const ConfigMap& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (v.size() != 1) throw DomainError(key + ": lists are only accepted by solve");
    return v.front();
}

struct SimulationConfig {
    ModelParams params;
    std::size_t replicas = 10;
};

inline const std::set<std::string> kSimulationKeys = {"B", "C", "alpha", "rho", "beta", "N_f", "T", "seed", "replicas", "warm_start"};

inline SimulationConfig simulation_config(const ConfigMap& cfg) {
    check_keys(cfg, kSimulationKeys);
    for (const char* required : {"B", "C", "alpha", "rho"})
        if (!cfg.count(required)) throw DomainError(std::string(required) + ": missing");
    SimulationConfig sc;
    auto& p = sc.params;
    p.B = detail::to_real("B", single(cfg, "B"));
    p.C = detail::to_real("C", single(cfg, "C"));
    p.alpha = detail::to_real("alpha", single(cfg, "alpha"));
    p.rho = detail::to_real("rho", single(cfg, "rho"));
    if (cfg.count("beta")) p.beta = detail::to_real("beta", single(cfg, "beta"));
    if (cfg.count("N_f")) p.N_f = detail::to_int<std::int64_t>("N_f", single(cfg, "N_f"));
    if (cfg.count("T")) p.T = detail::to_int<std::int64_t>("T", single(cfg, "T"));
    if (cfg.count("seed")) p.seed = detail::to_int<std::uint64_t>("seed", single(cfg, "seed"));
    if (cfg.count("warm_start")) p.warm_start = detail::to_bool("warm_start", single(cfg, "warm_start"));
    if (cfg.count("replicas")) {
        const auto r = detail::to_int<std::int64_t>("replicas", single(cfg, "replicas"));
        if (r < 1) throw DomainError("replicas: must be >= 1");
        sc.replicas = static_cast<std::size_t>(r);
    }
    p.validate();
    return sc;
}

inline const std::set<std::string> kSolveKeys = {"B", "C", "alpha", "rho", "beta", "N_f", "N_i", "T", "dt", "seed", "replicas", "warm_start"};

// One AnalyticParams per point of the Cartesian product of list-valued keys,
// in key order with the last key varying fastest.
inline std::vector<AnalyticParams> solve_configs(const ConfigMap& cfg) {
    check_keys(cfg, kSolveKeys);
    for (const char* required : {"B", "C", "alpha", "rho"})
        if (!cfg.count(required)) throw DomainError(std::string(required) + ": missing");
    const std::vector<std::string> axes = {"B", "C", "alpha", "rho", "N_f", "N_i", "T", "dt"};
    std::map<std::string, std::vector<double>> values;
    for (const auto& k : axes)
        if (cfg.count(k))
            for (const auto& v : cfg.at(k)) values[k].push_back(detail::to_real(k, v));
    if (!values.count("N_f")) values["N_f"] = {1000};
    if (!values.count("T")) values["T"] = {1000};
    if (!values.count("dt")) values["dt"] = {0.01};
    std::vector<std::map<std::string, double>> points = {{}};
    for (const auto& k : axes) {
        if (!values.count(k)) continue;
        std::vector<std::map<std::string, double>> next;
        for (const auto& pt : points)
            for (double v : values.at(k)) {
                auto q = pt;
                q[k] = v;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    std::vector<AnalyticParams> out;
    for (const auto& pt : points) {
        const double n_i = pt.count("N_i") ? pt.at("N_i") : pt.at("N_f");
        if (!(pt.at("C") > 0 && pt.at("C") < 1)) throw DomainError("C: must be in (0, 1)");
        auto a = AnalyticParams::from_normalized(pt.at("B"), pt.at("C"), pt.at("alpha"), pt.at("rho"), pt.at("T"), n_i,
                                                 pt.at("dt"));
        a.validate();
        out.push_back(a);
    }
    return out;
}

} // namespace memepop
