// Copyright 2026 The holstein-ness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hns/fockspace.hpp"
#include "hns/holstein.hpp"
#include "hns/lindblad.hpp"
#include "hns/numerics.hpp"
#include "hns/serialize.hpp"

namespace hns::cli {

enum class Solver { secular, partial, full, kinetic };

inline std::string to_string(Solver s) {
    switch (s) {
        case Solver::secular: return "secular";
        case Solver::partial: return "partial";
        case Solver::full: return "full";
        case Solver::kinetic: return "kinetic";
    }
    return "?";
}

inline Solver parse_solver(const std::string& text) {
    if (text == "secular") return Solver::secular;
    if (text == "partial") return Solver::partial;
    if (text == "full") return Solver::full;
    if (text == "kinetic") return Solver::kinetic;
    throw ConfigError("unknown solver '" + text + "'");
}

// Either an inclusive arithmetic range start:stop:step or an explicit value
// list, optionally augmented with every reduced rational j/m (m up to
// insert_rational_denoms) falling inside the span.  Exact rationals matter:
// high-denominator resonances are far narrower than any practical grid step.
struct GridSpec {
    bool is_range = true;
    double start = 0, stop = 0, step = 0;
    std::vector<double> values;
    int insert_rational_denoms = 0;

    static GridSpec parse(const std::string& text) {
        GridSpec g;
        if (text.find(':') != std::string::npos) {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            std::string tok;
            while (std::getline(ss, tok, ':')) parts.push_back(tok);
            if (parts.size() != 3) throw ConfigError("grid range must be start:stop:step");
            g.is_range = true;
            g.start = std::stod(parts[0]);
            g.stop = std::stod(parts[1]);
            g.step = std::stod(parts[2]);
        } else {
            g.is_range = false;
            std::stringstream ss(text);
            std::string tok;
            while (std::getline(ss, tok, ',')) g.values.push_back(std::stod(tok));
        }
        return g;
    }

    std::string to_string() const {
        if (is_range) return fmt17(start) + ":" + fmt17(stop) + ":" + fmt17(step);
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += (i ? "," : "") + fmt17(values[i]);
        return s;
    }

    std::vector<double> materialize() const {
        std::vector<double> v;
        if (is_range) {
            if (step <= 0) throw ConfigError("grid step must be > 0");
            if (stop < start) throw ConfigError("grid stop must be >= start");
            long n = std::lround(std::floor((stop - start) / step + 1e-9));
            for (long k = 0; k <= n; ++k) v.push_back(start + k * step);
        } else {
            v = values;
        }
        if (v.empty()) throw ConfigError("empty grid");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] <= v[i - 1]) throw ConfigError("grid must be strictly increasing");
        if (insert_rational_denoms >= 1) {
            std::vector<double> add;
            for (int m = 1; m <= insert_rational_denoms; ++m)
                for (long long j = std::llround(std::ceil(v.front() * m - 1e-9));
                     j <= std::llround(std::floor(v.back() * m + 1e-9)); ++j) {
                    if (j <= 0 || std::gcd(j, static_cast<long long>(m)) != 1) continue;
                    double x = double(j) / double(m);
                    auto it = std::lower_bound(v.begin(), v.end(), x);
                    bool close = (it != v.end() && *it - x < 1e-9) ||
                                 (it != v.begin() && x - *(it - 1) < 1e-9);
                    if (!close) add.push_back(x);
                }
            v.insert(v.end(), add.begin(), add.end());
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    v.end());
        }
        return v;
    }
};

struct AxisSpec {
    std::string name;  // delta | R | lambda | j_hop
    GridSpec grid;
};

// Complete description of one run: fixed parameter templates, up to two sweep
// axes, solver selection and requested outputs.
struct SweepSpec {
    holstein::ChainParams chain{4, 0.45, 0.5, 0.01, 0.0};
    lindblad::BathRates rates{1e-7, 1e-9, 1e-10};
    fock::BosonTruncation trunc{10, 4};
    Solver solver = Solver::secular;
    std::optional<AxisSpec> axis1;
    std::optional<AxisSpec> axis2;
    std::vector<std::string> outputs{"site_populations", "rho", "msd", "p_ex"};
    int n_levels = 12;
    int threads = 1;
    // kinetic-solver parameters
    int jump_length = 0;
    double f = 1e-3;
    double g = 0;
    int full_dim_cap = 200;

    void validate() const;
};

inline long long count_occupation_vectors(int n_sites, const fock::BosonTruncation& t) {
    if (!t.total_max) {
        long long r = 1;
        for (int i = 0; i < n_sites; ++i) {
            r *= (t.per_mode_max + 1);
            if (r > (1LL << 60)) return r;  // saturate; only used for cap checks
        }
        return r;
    }
    std::vector<long long> dp(*t.total_max + 1, 0);
    dp[0] = 1;
    for (int mode = 0; mode < n_sites; ++mode) {
        std::vector<long long> next(dp.size(), 0);
        for (std::size_t tot = 0; tot < dp.size(); ++tot)
            for (int q = 0; q <= t.per_mode_max && q + tot < dp.size(); ++q)
                next[tot + q] += dp[tot];
        dp = std::move(next);
    }
    long long r = 0;
    for (long long x : dp) r += x;
    return r;
}

inline long long basis_dimension(int n_sites, const fock::BosonTruncation& t) {
    return 1 + n_sites * count_occupation_vectors(n_sites, t);
}

inline void SweepSpec::validate() const {
    chain.validate();
    rates.validate();
    trunc.validate(chain.n_sites);
    static const std::set<std::string> axis_names{"delta", "R", "lambda", "j_hop"};
    static const std::set<std::string> output_names{"site_populations", "rho",     "msd",
                                                    "p_ex",             "spectrum", "crossings"};
    for (const auto* axis : {&axis1, &axis2}) {
        if (!axis->has_value()) continue;
        if (!axis_names.count((*axis)->name))
            throw ConfigError("unknown axis '" + (*axis)->name + "'");
        (*axis)->grid.materialize();  // validates ordering
        if ((*axis)->name == "R" && rates.r_r <= 0)
            throw ConfigError("axis R requires r_r > 0");
    }
    if (axis2 && !axis1) throw ConfigError("axis2 given without axis1");
    if (axis1 && axis2 && axis1->name == axis2->name)
        throw ConfigError("axis1 and axis2 must differ");
    for (const auto& o : outputs)
        if (!output_names.count(o)) throw ConfigError("unknown output '" + o + "'");
    if (solver == Solver::full) {
        long long dim = basis_dimension(chain.n_sites, trunc);
        if (dim > full_dim_cap)
            throw FeasibilityError("full solver infeasible: basis dimension " +
                                   std::to_string(dim) + " exceeds the cap " +
                                   std::to_string(full_dim_cap) +
                                   " (reduce the truncation or use the secular solver)");
    }
    if (solver == Solver::kinetic) {
        if (f <= 0) throw ConfigError("kinetic solver requires f > 0");
        if ((jump_length == 0) != (g == 0))
            throw ConfigError("kinetic solver requires jump_length == 0 iff g == 0");
        if (rates.r_r <= 0) throw ConfigError("kinetic solver requires r_r > 0");
    }
    if (n_levels < 1) throw ConfigError("n_levels must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

// ---------------------------------------------------------------------------
// Key/value config files: one `key = value` per line, '#' comments.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

struct KeyValue {
    std::string value;
    int line = 0;
};

inline double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": malformed number '" + v + "'");
    }
}

inline int parse_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError(where + ": malformed integer '" + v + "'");
    }
}

}  // namespace detail

inline SweepSpec parse_config_text(const std::string& text, const std::string& origin = "config") {
    static const std::set<std::string> known_keys{
        "n_sites",     "delta",       "lambda",          "j_hop",          "eps10",
        "r_b",         "r_r",         "r_p",             "per_mode_max",   "total_max",
        "solver",      "axis1",       "axis1_grid",      "axis1_rationals", "axis2",
        "axis2_grid",  "axis2_rationals", "outputs",     "n_levels",       "threads",
        "jump_length", "f",           "g",               "full_dim_cap"};

    std::map<std::string, detail::KeyValue> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (!known_keys.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        kv[key] = {value, line_no};
    }

    auto where = [&](const std::string& key) {
        auto it = kv.find(key);
        return origin + ":" + (it != kv.end() ? std::to_string(it->second.line) : "0");
    };
    auto number = [&](const std::string& key, double dflt) {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : detail::parse_double(it->second.value, where(key));
    };
    auto integer = [&](const std::string& key, int dflt) {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : detail::parse_int(it->second.value, where(key));
    };

    SweepSpec spec;
    spec.chain.n_sites = integer("n_sites", spec.chain.n_sites);
    spec.chain.delta = number("delta", spec.chain.delta);
    spec.chain.lambda = number("lambda", spec.chain.lambda);
    spec.chain.j_hop = number("j_hop", spec.chain.j_hop);
    spec.chain.eps10 = number("eps10", spec.chain.eps10);
    spec.rates.r_b = number("r_b", spec.rates.r_b);
    spec.rates.r_r = number("r_r", spec.rates.r_r);
    spec.rates.r_p = number("r_p", spec.rates.r_p);
    spec.trunc.per_mode_max = integer("per_mode_max", spec.trunc.per_mode_max);
    if (auto it = kv.find("total_max"); it != kv.end()) {
        if (it->second.value == "none")
            spec.trunc.total_max.reset();
        else
            spec.trunc.total_max = detail::parse_int(it->second.value, where("total_max"));
    }
    if (auto it = kv.find("solver"); it != kv.end()) {
        try {
            spec.solver = parse_solver(it->second.value);
        } catch (const ConfigError& e) {
            throw ConfigError(where("solver") + ": " + e.what());
        }
    }
    for (int a = 1; a <= 2; ++a) {
        std::string base = "axis" + std::to_string(a);
        auto it = kv.find(base);
        if (it == kv.end()) {
            if (kv.count(base + "_grid") || kv.count(base + "_rationals"))
                throw ConfigError(origin + ": " + base + "_grid given without " + base);
            continue;
        }
        AxisSpec axis;
        axis.name = it->second.value;
        if (auto g = kv.find(base + "_grid"); g != kv.end()) {
            try {
                axis.grid = GridSpec::parse(g->second.value);
            } catch (const std::exception& e) {
                throw ConfigError(where(base + "_grid") + ": " + e.what());
            }
        } else if (axis.name == "delta") {
            axis.grid = GridSpec{true, 0.05, 2.0, 0.005, {}, 0};
        } else {
            throw ConfigError(where(base) + ": " + base + "_grid required for axis '" +
                              axis.name + "'");
        }
        axis.grid.insert_rational_denoms = integer(base + "_rationals", 0);
        (a == 1 ? spec.axis1 : spec.axis2) = std::move(axis);
    }
    if (auto it = kv.find("outputs"); it != kv.end()) {
        spec.outputs.clear();
        std::stringstream ss(it->second.value);
        std::string tok;
        while (std::getline(ss, tok, ',')) spec.outputs.push_back(detail::trim(tok));
    }
    spec.n_levels = integer("n_levels", spec.n_levels);
    spec.threads = integer("threads", spec.threads);
    spec.jump_length = integer("jump_length", spec.jump_length);
    spec.f = number("f", spec.f);
    spec.g = number("g", spec.g);
    spec.full_dim_cap = integer("full_dim_cap", spec.full_dim_cap);

    try {
        spec.validate();
    } catch (const FeasibilityError& e) {
        throw FeasibilityError(where("solver") + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return spec;
}

inline SweepSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

// Fully expanded, defaults included; a serialized spec re-parses to an
// identical spec, which is what makes sweep manifests reproducible.
inline std::string serialize_config(const SweepSpec& spec) {
    std::string s;
    auto put = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    put("n_sites", std::to_string(spec.chain.n_sites));
    put("delta", fmt17(spec.chain.delta));
    put("lambda", fmt17(spec.chain.lambda));
    put("j_hop", fmt17(spec.chain.j_hop));
    put("eps10", fmt17(spec.chain.eps10));
    put("r_b", fmt17(spec.rates.r_b));
    put("r_r", fmt17(spec.rates.r_r));
    put("r_p", fmt17(spec.rates.r_p));
    put("per_mode_max", std::to_string(spec.trunc.per_mode_max));
    put("total_max", spec.trunc.total_max ? std::to_string(*spec.trunc.total_max) : "none");
    put("solver", to_string(spec.solver));
    for (int a = 1; a <= 2; ++a) {
        const auto& axis = (a == 1) ? spec.axis1 : spec.axis2;
        if (!axis) continue;
        std::string base = "axis" + std::to_string(a);
        put(base, axis->name);
        put(base + "_grid", axis->grid.to_string());
        put(base + "_rationals", std::to_string(axis->grid.insert_rational_denoms));
    }
    std::string outs;
    for (std::size_t i = 0; i < spec.outputs.size(); ++i)
        outs += (i ? "," : "") + spec.outputs[i];
    put("outputs", outs);
    put("n_levels", std::to_string(spec.n_levels));
    put("threads", std::to_string(spec.threads));
    put("jump_length", std::to_string(spec.jump_length));
    put("f", fmt17(spec.f));
    put("g", fmt17(spec.g));
    put("full_dim_cap", std::to_string(spec.full_dim_cap));
    return s;
}

}  // namespace hns::cli
