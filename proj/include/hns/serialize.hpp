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

#include <cstdio>
#include <string>

#include <json.hpp>

#include "hns/holstein.hpp"
#include "hns/kinetics.hpp"
#include "hns/lindblad.hpp"

namespace hns::cli {

// All CSV output uses 17 significant digits so values round-trip bit-exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kNessCsvHeader =
    "delta,lambda,j_hop,r_b,r_r,r_p,R,p_ex,msd,site,P,rho,status\n";

inline void append_ness_rows(std::string& csv, const holstein::ChainParams& chain,
                             const lindblad::BathRates& rates, const lindblad::NessSolution& sol,
                             const std::string& status = "ok") {
    const double big_r = rates.r_r > 0 ? rates.r_b / rates.r_r : std::nan("");
    std::string prefix = fmt17(chain.delta) + "," + fmt17(chain.lambda) + "," +
                         fmt17(chain.j_hop) + "," + fmt17(rates.r_b) + "," + fmt17(rates.r_r) +
                         "," + fmt17(rates.r_p) + "," + fmt17(big_r) + ",";
    for (int n = 1; n <= sol.site_populations.size(); ++n) {
        csv += prefix + fmt17(sol.p_ex) + "," + fmt17(sol.msd) + "," + std::to_string(n) + "," +
               fmt17(sol.site_populations(n - 1)) + "," +
               fmt17(sol.rho_defined ? sol.rho(n - 1) : std::nan("")) + "," + status + "\n";
    }
}

inline void append_ness_error_row(std::string& csv, const holstein::ChainParams& chain,
                                  const lindblad::BathRates& rates, const std::string& status) {
    const double big_r = rates.r_r > 0 ? rates.r_b / rates.r_r : std::nan("");
    const double nan = std::nan("");
    csv += fmt17(chain.delta) + "," + fmt17(chain.lambda) + "," + fmt17(chain.j_hop) + "," +
           fmt17(rates.r_b) + "," + fmt17(rates.r_r) + "," + fmt17(rates.r_p) + "," +
           fmt17(big_r) + "," + fmt17(nan) + "," + fmt17(nan) + ",0," + fmt17(nan) + "," +
           fmt17(nan) + "," + status + "\n";
}

inline constexpr const char* kKineticCsvHeader = "N,m,k_nn,k_j,k_r,k_p,site,rho\n";

inline void append_kinetic_rows(std::string& csv, const kinetics::KineticParams& p,
                                const kinetics::KineticNess& ness) {
    std::string prefix = std::to_string(p.n_sites) + "," + std::to_string(p.jump_length) + "," +
                         fmt17(p.k_nn) + "," + fmt17(p.k_j) + "," + fmt17(p.k_r) + "," +
                         fmt17(p.k_p) + ",";
    for (int n = 1; n <= p.n_sites; ++n)
        csv += prefix + std::to_string(n) + "," + fmt17(ness.rho(n - 1)) + "\n";
}

inline constexpr const char* kSpectrumCsvHeader = "delta,level_index,energy\n";

inline std::string spectrum_csv(const holstein::SpectrumSweep& sweep) {
    std::string csv = kSpectrumCsvHeader;
    for (Eigen::Index i = 0; i < sweep.energies.rows(); ++i)
        for (Eigen::Index l = 0; l < sweep.energies.cols(); ++l)
            csv += fmt17(sweep.deltas[i]) + "," + std::to_string(l) + "," +
                   fmt17(sweep.energies(i, l)) + "\n";
    return csv;
}

inline constexpr const char* kCrossingsCsvHeader = "delta_star,gap,jump_length,lower_level\n";

inline std::string crossings_csv(const std::vector<holstein::CrossingReport>& reports) {
    std::string csv = kCrossingsCsvHeader;
    for (const auto& c : reports)
        csv += fmt17(c.delta_star) + "," + fmt17(c.gap) + "," + std::to_string(c.jump_length) +
               "," + std::to_string(c.lower_level) + "\n";
    return csv;
}

inline nlohmann::json to_json(const lindblad::NessSolution& sol) {
    nlohmann::json j;
    j["ground_population"] = sol.ground_population;
    j["p_ex"] = sol.p_ex;
    j["msd"] = sol.msd;
    j["site_populations"] = std::vector<double>(
        sol.site_populations.data(), sol.site_populations.data() + sol.site_populations.size());
    if (sol.rho_defined)
        j["rho"] = std::vector<double>(sol.rho.data(), sol.rho.data() + sol.rho.size());
    else
        j["rho"] = nullptr;
    if (sol.eigen_populations.size() > 0)
        j["eigen_populations"] =
            std::vector<double>(sol.eigen_populations.data(),
                                sol.eigen_populations.data() + sol.eigen_populations.size());
    return j;
}

inline nlohmann::json to_json(const kinetics::PopulationFactors& f) {
    return nlohmann::json{{"alpha", f.alpha}, {"gamma", f.gamma}, {"mu", f.mu},
                          {"nu", f.nu},       {"xi", f.xi},       {"chi", f.chi}};
}

}  // namespace hns::cli
