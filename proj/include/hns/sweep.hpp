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

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hns/config.hpp"
#include "hns/fockspace.hpp"
#include "hns/holstein.hpp"
#include "hns/kinetics.hpp"
#include "hns/lindblad.hpp"
#include "hns/numerics.hpp"
#include "hns/serialize.hpp"

namespace hns::cli {

struct SweepPoint {
    double axis1 = std::nan("");
    double axis2 = std::nan("");
    holstein::ChainParams chain;
    lindblad::BathRates rates;
    std::string status = "ok";
    lindblad::NessSolution sol;
    bool has_sol = false;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<double> grid1;
    std::vector<double> grid2;  // single NaN entry when axis2 is absent
    std::vector<SweepPoint> points;  // ordered axis2-major, axis1-minor
};

namespace detail {

inline void apply_axis(const std::string& name, double v, holstein::ChainParams& chain,
                       lindblad::BathRates& rates) {
    if (name == "delta")
        chain.delta = v;
    else if (name == "lambda")
        chain.lambda = v;
    else if (name == "j_hop")
        chain.j_hop = v;
    else if (name == "R")
        rates.r_b = v * rates.r_r;  // R swept by varying r_b at fixed r_r
    else
        throw ConfigError("unknown axis '" + name + "'");
}

// Rate matrix split into unit-rate parts so points differing only in rates
// reuse one eigendecomposition: W(r) = r_b W_b + r_r W_r + r_p W_p.
struct SecularParts {
    holstein::EigenSystem es;
    Eigen::MatrixXd w_b, w_r, w_p;
};

inline SecularParts secular_parts(const holstein::ChainParams& chain,
                                  std::shared_ptr<const fock::Basis> basis) {
    SecularParts parts;
    parts.es = holstein::eigensystem(holstein::build_hamiltonian(chain, *basis), basis);
    parts.w_b =
        lindblad::secular_rate_matrix(parts.es, lindblad::build_lindblad_ops(*basis, {1, 0, 0})).w;
    parts.w_r =
        lindblad::secular_rate_matrix(parts.es, lindblad::build_lindblad_ops(*basis, {0, 1, 0})).w;
    parts.w_p =
        lindblad::secular_rate_matrix(parts.es, lindblad::build_lindblad_ops(*basis, {0, 0, 1})).w;
    return parts;
}

inline lindblad::NessSolution solve_point(const SweepSpec& spec, const SecularParts* parts,
                                          std::shared_ptr<const fock::Basis> basis,
                                          const holstein::ChainParams& chain,
                                          const lindblad::BathRates& rates) {
    switch (spec.solver) {
        case Solver::secular: {
            lindblad::RateMatrix w{rates.r_b * parts->w_b + rates.r_r * parts->w_r +
                                   rates.r_p * parts->w_p};
            return lindblad::ness_observables(lindblad::ness_secular(w), parts->es);
        }
        case Solver::partial: {
            auto channels = lindblad::build_lindblad_ops(*basis, rates);
            auto bands = lindblad::MinibandPartition::cluster(
                parts->es.energies, lindblad::default_band_threshold(rates));
            auto gen = lindblad::partial_secular_generator(parts->es, channels, bands);
            Eigen::MatrixXcd rho_e = lindblad::ness_partial(gen);
            Eigen::MatrixXcd rho_fock =
                parts->es.vectors * rho_e * parts->es.vectors.transpose();
            return lindblad::ness_observables(rho_fock, *basis);
        }
        case Solver::full: {
            auto channels = lindblad::build_lindblad_ops(*basis, rates);
            auto liou = lindblad::full_liouvillian(holstein::build_hamiltonian(chain, *basis),
                                                   channels, spec.full_dim_cap);
            return lindblad::ness_observables(lindblad::ness_full(liou), *basis);
        }
        case Solver::kinetic: {
            auto p = kinetics::KineticParams::from_bath(chain.n_sites, spec.jump_length, rates,
                                                        spec.f, spec.g);
            auto kn = kinetics::kinetic_ness(p);
            lindblad::NessSolution sol;
            sol.site_populations = kn.rho * kn.p_ex;
            sol.ground_population = kn.p_g;
            sol.p_ex = kn.p_ex;
            sol.rho = kn.rho;
            sol.rho_defined = true;
            for (int n = 1; n <= chain.n_sites; ++n)
                sol.msd += double((chain.n_sites - n) * (chain.n_sites - n)) *
                           sol.site_populations(n - 1);
            return sol;
        }
    }
    throw std::logic_error("solve_point: unreachable");
}

}  // namespace detail

// Runs every grid point; per-point solver failures are recorded in the point
// status and the sweep continues.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    result.grid1 = spec.axis1 ? spec.axis1->grid.materialize() : std::vector<double>{std::nan("")};
    result.grid2 = spec.axis2 ? spec.axis2->grid.materialize() : std::vector<double>{std::nan("")};

    auto basis = fock::make_basis(spec.chain.n_sites, spec.trunc);
    const std::size_t n1 = result.grid1.size();
    const std::size_t n2 = result.grid2.size();
    result.points.resize(n1 * n2);

    // Points sharing closed-system parameters reuse one eigensystem; group
    // them and parallelize over groups.
    std::map<std::tuple<double, double, double>, std::vector<std::size_t>> groups;
    for (std::size_t i2 = 0; i2 < n2; ++i2)
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            std::size_t idx = i2 * n1 + i1;
            SweepPoint& pt = result.points[idx];
            pt.chain = spec.chain;
            pt.rates = spec.rates;
            if (spec.axis1) {
                pt.axis1 = result.grid1[i1];
                detail::apply_axis(spec.axis1->name, pt.axis1, pt.chain, pt.rates);
            }
            if (spec.axis2) {
                pt.axis2 = result.grid2[i2];
                detail::apply_axis(spec.axis2->name, pt.axis2, pt.chain, pt.rates);
            }
            groups[{pt.chain.delta, pt.chain.lambda, pt.chain.j_hop}].push_back(idx);
        }
    std::vector<std::vector<std::size_t>> group_list;
    group_list.reserve(groups.size());
    for (auto& [key, idxs] : groups) group_list.push_back(std::move(idxs));

    const bool needs_eigensystem =
        spec.solver == Solver::secular || spec.solver == Solver::partial;
    num::parallel_for(group_list.size(), spec.threads, [&](std::size_t gi) {
        detail::SecularParts parts;
        bool parts_ready = false;
        for (std::size_t idx : group_list[gi]) {
            SweepPoint& pt = result.points[idx];
            try {
                if (needs_eigensystem && !parts_ready) {
                    parts = detail::secular_parts(pt.chain, basis);
                    parts_ready = true;
                }
                pt.sol = detail::solve_point(spec, parts_ready ? &parts : nullptr, basis,
                                             pt.chain, pt.rates);
                pt.has_sol = true;
            } catch (const std::exception& e) {
                std::string msg = e.what();
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                pt.status = "error: " + msg;
            }
        }
    });
    return result;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string csv = kNessCsvHeader;
    for (const auto& pt : result.points) {
        if (pt.has_sol)
            append_ness_rows(csv, pt.chain, pt.rates, pt.sol, pt.status);
        else
            append_ness_error_row(csv, pt.chain, pt.rates, pt.status);
    }
    return csv;
}

// ---------------------------------------------------------------------------
// Plot-ready exports
// ---------------------------------------------------------------------------

namespace detail {

inline double point_quantity(const SweepPoint& pt, const std::string& quantity, int site) {
    if (!pt.has_sol) return std::nan("");
    if (quantity == "rho")
        return pt.sol.rho_defined ? pt.sol.rho(site - 1) : std::nan("");
    if (quantity == "P") return pt.sol.site_populations(site - 1);
    if (quantity == "msd") return pt.sol.msd;
    if (quantity == "p_ex") return pt.sol.p_ex;
    throw ConfigError("emit_plotdata: unknown quantity '" + quantity + "'");
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace detail

// kind == "lines": one two-column file per series (per site for site-resolved
// quantities).  kind == "heatmap": one rectangular grid file per series with
// both axes as headers; requires two axes and a complete (non-ragged) grid.
inline std::vector<std::string> emit_plotdata(const SweepResult& result, const std::string& kind,
                                              const std::string& out_dir,
                                              const std::string& quantity = "rho") {
    std::filesystem::create_directories(out_dir);
    const int n_sites = result.spec.chain.n_sites;
    const bool site_resolved = (quantity == "rho" || quantity == "P");
    const std::string axis1 = result.spec.axis1 ? result.spec.axis1->name : "index";
    std::vector<std::string> written;

    if (kind == "lines") {
        if (result.spec.axis2) throw ConfigError("emit_plotdata: lines needs a single axis");
        const int n_series = site_resolved ? n_sites : 1;
        for (int s = 1; s <= n_series; ++s) {
            std::string name =
                quantity + (site_resolved ? "_site" + std::to_string(s) : "") + ".csv";
            std::string body = axis1 + "," + quantity + "\n";
            for (std::size_t i = 0; i < result.points.size(); ++i)
                body += fmt17(result.points[i].axis1) + "," +
                        fmt17(detail::point_quantity(result.points[i], quantity, s)) + "\n";
            detail::write_file(std::filesystem::path(out_dir) / name, body);
            written.push_back(name);
        }
        return written;
    }
    if (kind != "heatmap") throw ConfigError("emit_plotdata: kind must be lines or heatmap");
    if (!result.spec.axis2) throw ConfigError("emit_plotdata: heatmap needs two axes");
    const std::size_t n1 = result.grid1.size();
    const std::size_t n2 = result.grid2.size();
    if (result.points.size() != n1 * n2)
        throw ConfigError("emit_plotdata: ragged grid");
    for (const auto& pt : result.points)
        if (!pt.has_sol) throw ConfigError("emit_plotdata: ragged grid (failed points)");

    const std::string axis2 = result.spec.axis2->name;
    const int n_series = site_resolved ? n_sites : 1;
    for (int s = 1; s <= n_series; ++s) {
        std::string name =
            quantity + (site_resolved ? "_site" + std::to_string(s) : "") + "_grid.csv";
        std::string body = axis2 + "\\" + axis1;
        for (double v : result.grid1) body += "," + fmt17(v);
        body += "\n";
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            body += fmt17(result.grid2[i2]);
            for (std::size_t i1 = 0; i1 < n1; ++i1)
                body += "," + fmt17(detail::point_quantity(result.points[i2 * n1 + i1], quantity, s));
            body += "\n";
        }
        detail::write_file(std::filesystem::path(out_dir) / name, body);
        written.push_back(name);
    }
    return written;
}

// Writes sweep.csv, the manifest, and any plot-data files requested by the
// spec outputs.  Re-running from manifest.cfg alone reproduces sweep.csv
// byte-identically.
inline void write_sweep_outputs(const SweepResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    detail::write_file(std::filesystem::path(out_dir) / "sweep.csv", sweep_csv(result));
    detail::write_file(std::filesystem::path(out_dir) / "manifest.cfg",
                       serialize_config(result.spec));
    const std::string kind = result.spec.axis2 ? "heatmap" : "lines";
    bool all_ok = true;
    for (const auto& pt : result.points) all_ok = all_ok && pt.has_sol;
    if (!all_ok) return;  // plot data only for complete grids
    for (const auto& out : result.spec.outputs) {
        if (out == "rho" || out == "msd" || out == "p_ex")
            emit_plotdata(result, kind, out_dir, out);
        if (out == "site_populations") emit_plotdata(result, kind, out_dir, "P");
    }
}

// ---------------------------------------------------------------------------
// Secular-vs-full comparison protocol (the validate-secular subcommand)
// ---------------------------------------------------------------------------

struct SecularComparisonRow {
    double r = 0;  // overall dissipation scale = r_b = max rate
    lindblad::BathRates rates;
    double max_rel_discrepancy = std::nan("");
    lindblad::SecularValidityReport validity;
    std::string status = "ok";
};

struct SecularComparison {
    std::vector<SecularComparisonRow> rows;
    double tolerance = 0.01;
    double threshold_r = 0;  // largest grid r with discrepancy < tolerance
};

// For each r the rates are (r_b, r_r, r_p) = (r, r/R, rp_over_rr * r/R); the
// reported discrepancy is max_n |rho_sec,n - rho_full,n| / max_n rho_full,n.
inline SecularComparison validate_secular(const holstein::ChainParams& chain,
                                          const fock::BosonTruncation& trunc,
                                          const std::vector<double>& r_grid, double big_r = 100.0,
                                          double rp_over_rr = 0.01, int full_dim_cap = 200,
                                          double tolerance = 0.01) {
    chain.validate();
    if (big_r < 1.0)
        throw std::invalid_argument("validate_secular: protocol assumes R >= 1 (r_b is the max)");
    for (double r : r_grid)
        if (r <= 0)
            throw std::invalid_argument(
                "validate_secular: r must be > 0 (a closed system has a degenerate kernel)");
    long long dim = basis_dimension(chain.n_sites, trunc);
    if (dim > full_dim_cap)
        throw FeasibilityError("validate_secular: basis dimension " + std::to_string(dim) +
                               " exceeds the full-solver cap " + std::to_string(full_dim_cap));

    auto basis = fock::make_basis(chain.n_sites, trunc);
    auto h = holstein::build_hamiltonian(chain, *basis);
    auto parts = detail::secular_parts(chain, basis);

    SecularComparison cmp;
    cmp.tolerance = tolerance;
    for (double r : r_grid) {
        SecularComparisonRow row;
        row.r = r;
        row.rates = lindblad::BathRates{r, r / big_r, rp_over_rr * r / big_r};
        try {
            lindblad::RateMatrix w{row.rates.r_b * parts.w_b + row.rates.r_r * parts.w_r +
                                   row.rates.r_p * parts.w_p};
            auto sec = lindblad::ness_observables(lindblad::ness_secular(w), parts.es);
            auto channels = lindblad::build_lindblad_ops(*basis, row.rates);
            auto full =
                lindblad::ness_observables(lindblad::ness_full(lindblad::full_liouvillian(
                                               h, channels, full_dim_cap)),
                                           *basis);
            if (!sec.rho_defined || !full.rho_defined)
                throw NumericalError("validate_secular: vanishing one-exciton population");
            double scale = full.rho.maxCoeff();
            row.max_rel_discrepancy = (sec.rho - full.rho).cwiseAbs().maxCoeff() / scale;
            row.validity = lindblad::secular_validity(
                parts.es, row.rates,
                lindblad::MinibandPartition::cluster(
                    parts.es.energies, lindblad::default_band_threshold(row.rates)));
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            row.status = "error: " + msg;
        }
        cmp.rows.push_back(std::move(row));
    }
    for (const auto& row : cmp.rows)
        if (row.status == "ok" && row.max_rel_discrepancy < cmp.tolerance)
            cmp.threshold_r = std::max(cmp.threshold_r, row.r);
    return cmp;
}

inline std::string secular_comparison_csv(const SecularComparison& cmp) {
    std::string csv = "r,r_b,r_r,r_p,max_rel_discrepancy,omega_interband,omega_intraband,status\n";
    for (const auto& row : cmp.rows)
        csv += fmt17(row.r) + "," + fmt17(row.rates.r_b) + "," + fmt17(row.rates.r_r) + "," +
               fmt17(row.rates.r_p) + "," + fmt17(row.max_rel_discrepancy) + "," +
               fmt17(row.validity.omega_interband) + "," + fmt17(row.validity.omega_intraband) +
               "," + row.status + "\n";
    return csv;
}

}  // namespace hns::cli
