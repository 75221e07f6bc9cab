#include "cda/params.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cda/hash.hpp"

namespace cda {

namespace {

struct Range {
    double lo;
    double hi;
};

// Closed key set with validation ranges. Windows/horizons are integer-valued.
const std::map<std::string, std::pair<double, Range>>& registry() {
    static const std::map<std::string, std::pair<double, Range>> reg = {
        // ZIP: Widrow-Hoff margin adaptation with momentum; randomized per-trader
        // init ranges follow the classic setup.
        {"zip.beta_min", {0.1, {0.0, 1.0}}},
        {"zip.beta_max", {0.5, {0.0, 1.0}}},
        {"zip.momentum_min", {0.0, {0.0, 1.0}}},
        {"zip.momentum_max", {0.1, {0.0, 1.0}}},
        {"zip.margin_init_min", {0.05, {0.0, 1.0}}},
        {"zip.margin_init_max", {0.35, {0.0, 1.0}}},
        {"zip.ca", {0.05, {0.0, 10.0}}},  // absolute target perturbation, ticks
        {"zip.cr", {0.05, {0.0, 1.0}}},   // relative target perturbation

        // GDX: belief from accepted/rejected quote frequencies + DP over
        // remaining quoting opportunities.
        {"gdx.gamma", {0.9, {0.0, 1.0}}},
        {"gdx.history_window", {50, {1.0, 100000.0}}},
        {"gdx.max_horizon", {8, {1.0, 64.0}}},

        // AA: smoothed equilibrium estimate + aggressiveness with short/long
        // term learning.
        {"aa.eq_window", {5, {1.0, 1000.0}}},
        {"aa.eq_decay", {0.95, {0.0, 1.0}}},
        {"aa.beta_short_min", {0.1, {0.0, 1.0}}},
        {"aa.beta_short_max", {0.5, {0.0, 1.0}}},
        {"aa.beta_long_min", {0.1, {0.0, 1.0}}},
        {"aa.beta_long_max", {0.5, {0.0, 1.0}}},
        {"aa.theta_init", {-2.0, {-20.0, 20.0}}},
        {"aa.theta_min", {-8.0, {-20.0, 20.0}}},
        {"aa.theta_max", {2.0, {-20.0, 20.0}}},
        {"aa.theta_gamma", {2.0, {0.0, 20.0}}},
        {"aa.lambda_rel", {0.05, {0.0, 1.0}}},
        {"aa.lambda_abs", {0.05, {0.0, 10.0}}},
        {"aa.eta", {3.0, {1.0, 100.0}}},  // quote approach rate toward target
        {"aa.r_init_min", {-0.3, {-1.0, 1.0}}},
        {"aa.r_init_max", {0.0, {-1.0, 1.0}}},
        {"aa.cold_start_margin", {0.10, {0.0, 1.0}}},
    };
    return reg;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

StrategyParams StrategyParams::defaults() {
    StrategyParams p;
    for (const auto& [key, def] : registry()) p.values_[key] = def.first;
    return p;
}

StrategyParams StrategyParams::from_string(const std::string& body) {
    StrategyParams p = defaults();
    std::istringstream in(body);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParamsError("params line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (!registry().count(key))
            throw ParamsError("params line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
            p.values_[key] = v;
        } catch (const std::exception&) {
            throw ParamsError("params line " + std::to_string(lineno) + ": bad value '" + val +
                              "'");
        }
    }
    p.validate();
    return p;
}

StrategyParams StrategyParams::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParamsError("cannot open params file: " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    return from_string(body.str());
}

double StrategyParams::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParamsError("unknown param key: " + key);
    return it->second;
}

int StrategyParams::get_int(const std::string& key) const {
    return static_cast<int>(std::lround(get(key)));
}

void StrategyParams::set(const std::string& key, double value) {
    if (!registry().count(key)) throw ParamsError("unknown param key: " + key);
    values_[key] = value;
}

std::string StrategyParams::serialize() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.10g", value);
        out << key << " = " << buf << '\n';
    }
    return out.str();
}

std::uint64_t StrategyParams::hash() const { return fnv1a64(serialize()); }

void StrategyParams::validate() const {
    for (const auto& [key, value] : values_) {
        const auto& [def, range] = registry().at(key);
        (void)def;
        if (value < range.lo || value > range.hi)
            throw ParamsError("param out of range: " + key);
    }
    if (get("zip.beta_min") > get("zip.beta_max") ||
        get("zip.momentum_min") > get("zip.momentum_max") ||
        get("zip.margin_init_min") > get("zip.margin_init_max") ||
        get("aa.beta_short_min") > get("aa.beta_short_max") ||
        get("aa.beta_long_min") > get("aa.beta_long_max") ||
        get("aa.r_init_min") > get("aa.r_init_max") || get("aa.theta_min") > get("aa.theta_max"))
        throw ParamsError("param min exceeds max");
}

}  // namespace cda
