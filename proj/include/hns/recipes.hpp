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

#include <string>
#include <vector>

#include "hns/config.hpp"

namespace hns::cli {

// Named parameter sets for the standard figures of merit.  Each recipe runs
// under one subcommand; validate-secular recipes carry their r grid in
// axis1 ("R" is reused as the overall dissipation scale there).
struct Recipe {
    std::string name;
    std::string command;  // "spectrum" | "sweep" | "validate-secular"
    std::string description;
    SweepSpec spec;
};

inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
    std::vector<double> v;
    double ratio = std::pow(10.0, 1.0 / per_decade);
    for (double x = lo; x <= hi * (1 + 1e-9); x *= ratio) v.push_back(x);
    return v;
}

inline const std::vector<Recipe>& recipes() {
    static const std::vector<Recipe> all = [] {
        std::vector<Recipe> r;

        {  // Trimer one-exciton spectrum: prongs and avoided crossings.
            Recipe rec;
            rec.name = "fig2";
            rec.command = "spectrum";
            rec.description = "trimer spectrum vs delta (lambda=0.4, J=0.01); prongs with "
                              "integer slopes, avoided crossings at halves and integers";
            rec.spec.chain = {3, 0.45, 0.4, 0.01, 0.0};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 0}};
            rec.spec.n_levels = 12;
            rec.spec.outputs = {"spectrum", "crossings"};
            r.push_back(rec);
        }
        {  // Tetramer NESS hypersensitivity at intermediate exciton lifetime.
            Recipe rec;
            rec.name = "fig3";
            rec.command = "sweep";
            rec.description = "tetramer normalized NESS site populations vs delta at R=100 "
                              "(lambda=0.5, J=0.01, r_b=1e-7, r_r=1e-9, r_p=1e-10); site-2 "
                              "spikes at halves, site-1 spikes at thirds";
            rec.spec.chain = {4, 0.45, 0.5, 0.01, 0.0};
            rec.spec.rates = {1e-7, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 3}};
            r.push_back(rec);
        }
        {  // Resonance locations are set by delta alone; widths grow with lambda.
            Recipe rec;
            rec.name = "fig3-lambda";
            rec.command = "sweep";
            rec.description = "trimer bottom-site rho over (delta, lambda) at J=0.01, "
                              "r_b=r_r=1e-9, r_p=1e-10; spike locations independent of lambda";
            rec.spec.chain = {3, 0.45, 0.4, 0.01, 0.0};
            rec.spec.rates = {1e-9, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 2}};
            rec.spec.axis2 = AxisSpec{"lambda", GridSpec{true, 0.1, 0.5, 0.05, {}, 0}};
            rec.spec.outputs = {"rho"};
            r.push_back(rec);
        }
        {  // Same, widths grow with J.
            Recipe rec;
            rec.name = "fig3-j";
            rec.command = "sweep";
            rec.description = "trimer bottom-site rho over (delta, j_hop) at lambda=0.4, "
                              "r_b=r_r=1e-9, r_p=1e-10; spike locations independent of J";
            rec.spec.chain = {3, 0.45, 0.4, 0.01, 0.0};
            rec.spec.rates = {1e-9, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 2}};
            rec.spec.axis2 = AxisSpec{"j_hop", GridSpec{true, 0.005, 0.02, 0.0025, {}, 0}};
            rec.spec.outputs = {"rho"};
            r.push_back(rec);
        }
        {  // Pentamer eigenstate spatial profiles off and on resonance.
            Recipe rec;
            rec.name = "fig4";
            rec.command = "spectrum";
            rec.description = "pentamer eigenstate site populations at delta=0.45 and 0.50 "
                              "(lambda=0.4, J=0.01); localization vs alternating-site mixing";
            rec.spec.chain = {5, 0.45, 0.4, 0.01, 0.0};
            rec.spec.trunc = {10, 3};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{false, 0, 0, 0, {0.45, 0.50}, 0}};
            rec.spec.n_levels = 20;
            rec.spec.outputs = {"spectrum", "site_populations"};
            r.push_back(rec);
        }
        {  // Kinetic-model steady state across the exciton-lifetime ratio R.
            Recipe rec;
            rec.name = "fig5";
            rec.command = "sweep";
            rec.description = "kinetic tetramer with a 2-site jump (f=1e-3, g=1): rho vs R, "
                              "population factors interpolating between the R limits";
            rec.spec.chain = {4, 0.5, 0.5, 0.01, 0.0};
            rec.spec.rates = {1e-7, 1e-9, 1e-10};
            rec.spec.solver = Solver::kinetic;
            rec.spec.jump_length = 2;
            rec.spec.f = 1e-3;
            rec.spec.g = 1.0;
            rec.spec.axis1 = AxisSpec{"R", GridSpec{false, 0, 0, 0, log_grid(1e-2, 1e8, 2), 0}};
            r.push_back(rec);
        }
        {  // Short exciton lifetime: population stays on the top site.
            Recipe rec;
            rec.name = "fig6a";
            rec.command = "sweep";
            rec.description = "tetramer NESS vs delta at R=1 (r_b=r_r=1e-9); resonances "
                              "weakened, third-integer peaks below grid resolution";
            rec.spec.chain = {4, 0.45, 0.5, 0.01, 0.0};
            rec.spec.rates = {1e-9, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 0}};
            r.push_back(rec);
        }
        {  // Long exciton lifetime: population reaches the bottom site.
            Recipe rec;
            rec.name = "fig6b";
            rec.command = "sweep";
            rec.description = "tetramer NESS vs delta at R=1e6 (r_b=1e-3, r_r=1e-9); bottom "
                              "site dominates, populations equalize as delta -> 0";
            rec.spec.chain = {4, 0.45, 0.5, 0.01, 0.0};
            rec.spec.rates = {1e-3, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 0}};
            r.push_back(rec);
        }
        {  // Steady-state transport measure vs delta for several R.
            Recipe rec;
            rec.name = "fig7";
            rec.command = "sweep";
            rec.description = "tetramer MSD vs delta for R in {1, 100, 1e6} (r_r=1e-9, "
                              "r_p=1e-10 fixed, r_b varied)";
            rec.spec.chain = {4, 0.45, 0.5, 0.01, 0.0};
            rec.spec.rates = {1e-7, 1e-9, 1e-10};
            rec.spec.trunc = {10, 4};
            rec.spec.axis1 = AxisSpec{"delta", GridSpec{true, 0.05, 2.0, 0.005, {}, 0}};
            rec.spec.axis2 = AxisSpec{"R", GridSpec{false, 0, 0, 0, {1.0, 100.0, 1e6}, 0}};
            rec.spec.outputs = {"msd", "rho", "p_ex"};
            r.push_back(rec);
        }
        {  // Secular-vs-full agreement off resonance (reduced trimer).
            Recipe rec;
            rec.name = "appendixA-off";
            rec.command = "validate-secular";
            rec.description = "secular/full NESS discrepancy vs dissipation scale r at "
                              "delta=0.99 (lambda=0.2, J=0.01, total_max=2, R=100)";
            rec.spec.chain = {3, 0.99, 0.2, 0.01, 0.0};
            rec.spec.rates = {1e-6, 1e-8, 1e-10};
            rec.spec.trunc = {2, 2};
            rec.spec.solver = Solver::full;
            rec.spec.axis1 = AxisSpec{"R", GridSpec{false, 0, 0, 0, log_grid(1e-8, 1e-3, 2), 0}};
            r.push_back(rec);
        }
        {  // Same on resonance: the breakdown threshold drops by >= 10x.
            Recipe rec;
            rec.name = "appendixA-on";
            rec.command = "validate-secular";
            rec.description = "secular/full NESS discrepancy vs dissipation scale r at "
                              "delta=1.00 (lambda=0.2, J=0.01, total_max=2, R=100)";
            rec.spec.chain = {3, 1.00, 0.2, 0.01, 0.0};
            rec.spec.rates = {1e-6, 1e-8, 1e-10};
            rec.spec.trunc = {2, 2};
            rec.spec.solver = Solver::full;
            rec.spec.axis1 = AxisSpec{"R", GridSpec{false, 0, 0, 0, log_grid(1e-8, 1e-3, 2), 0}};
            r.push_back(rec);
        }
        return r;
    }();
    return all;
}

inline const Recipe* find_recipe(const std::string& name) {
    for (const auto& r : recipes())
        if (r.name == name) return &r;
    return nullptr;
}

}  // namespace hns::cli
