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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hns/config.hpp"
#include "hns/recipes.hpp"
#include "hns/serialize.hpp"
#include "hns/sweep.hpp"

namespace {

using namespace hns;

struct CommonOpts {
    std::string config_path;
    std::string recipe_name;
    std::string out_dir = ".";
    int threads = 0;  // 0 = keep spec value
    std::string truncation;
    std::string solver;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (key = value lines)");
    cmd->add_option("--recipe", opts.recipe_name, "built-in recipe name (see `hns recipes`)");
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--threads", opts.threads, "worker threads for sweep points");
    cmd->add_option("--truncation", opts.truncation,
                    "boson truncation per_mode[,total]; use per_mode,none to drop the total cap");
    cmd->add_option("--solver", opts.solver, "secular | partial | full | kinetic");
}

cli::SweepSpec load_spec(const CommonOpts& opts, const std::string& expect_command = "") {
    cli::SweepSpec spec;
    if (!opts.config_path.empty() && !opts.recipe_name.empty())
        throw ConfigError("--config and --recipe are mutually exclusive");
    if (!opts.config_path.empty()) {
        spec = cli::parse_config(opts.config_path);
    } else if (!opts.recipe_name.empty()) {
        const cli::Recipe* rec = cli::find_recipe(opts.recipe_name);
        if (!rec) throw ConfigError("unknown recipe '" + opts.recipe_name + "'");
        if (!expect_command.empty() && rec->command != expect_command)
            throw ConfigError("recipe '" + rec->name + "' belongs to subcommand '" +
                              rec->command + "'");
        spec = rec->spec;
    }
    if (!opts.truncation.empty()) {
        auto comma = opts.truncation.find(',');
        spec.trunc.per_mode_max = std::stoi(opts.truncation.substr(0, comma));
        if (comma == std::string::npos)
            spec.trunc.total_max.reset();
        else {
            std::string rest = opts.truncation.substr(comma + 1);
            if (rest == "none")
                spec.trunc.total_max.reset();
            else
                spec.trunc.total_max = std::stoi(rest);
        }
    }
    if (!opts.solver.empty()) spec.solver = cli::parse_solver(opts.solver);
    if (opts.threads > 0) spec.threads = opts.threads;
    spec.validate();
    return spec;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path().string());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

bool wants(const cli::SweepSpec& spec, const std::string& output) {
    return std::find(spec.outputs.begin(), spec.outputs.end(), output) != spec.outputs.end();
}

int run_spectrum(const CommonOpts& opts) {
    cli::SweepSpec spec = load_spec(opts, "spectrum");
    if (!spec.axis1 || spec.axis1->name != "delta")
        throw ConfigError("spectrum requires axis1 = delta");
    auto basis = fock::make_basis(spec.chain.n_sites, spec.trunc);
    auto grid = spec.axis1->grid.materialize();
    auto sweep =
        holstein::spectrum_sweep(spec.chain, basis, grid, spec.n_levels, true, spec.threads);
    std::filesystem::path out(opts.out_dir);
    std::filesystem::create_directories(out);
    write_text(out / "spectrum.csv", cli::spectrum_csv(sweep));
    std::cout << "spectrum.csv: " << grid.size() << " grid points x " << spec.n_levels
              << " levels\n";
    if (wants(spec, "crossings")) {
        auto crossings = holstein::detect_avoided_crossings(sweep);
        write_text(out / "crossings.csv", cli::crossings_csv(crossings));
        std::cout << "crossings.csv: " << crossings.size() << " reports\n";
    }
    if (wants(spec, "site_populations")) {
        std::string csv = "delta,level_index,energy,site,weight\n";
        for (double delta : grid) {
            holstein::ChainParams p = spec.chain;
            p.delta = delta;
            auto es = holstein::one_exciton_eigensystem(p, basis);
            auto w = holstein::eigenstate_site_populations(es);
            for (int l = 0; l < spec.n_levels; ++l)
                for (int site = 1; site <= spec.chain.n_sites; ++site)
                    csv += cli::fmt17(delta) + "," + std::to_string(l) + "," +
                           cli::fmt17(es.energies(l)) + "," + std::to_string(site) + "," +
                           cli::fmt17(w(l, site - 1)) + "\n";
        }
        write_text(out / "eigenstates.csv", csv);
        std::cout << "eigenstates.csv written\n";
    }
    return 0;
}

int run_sweep_cmd(const CommonOpts& opts) {
    cli::SweepSpec spec = load_spec(opts, "sweep");
    auto result = cli::run_sweep(spec);
    cli::write_sweep_outputs(result, opts.out_dir);
    std::size_t failures = 0;
    for (const auto& pt : result.points)
        if (!pt.has_sol) ++failures;
    std::cout << "sweep.csv: " << result.points.size() << " points, " << failures
              << " failures; manifest.cfg written\n";
    if (failures > 0) {
        for (const auto& pt : result.points)
            if (!pt.has_sol) {
                std::cerr << "first failure: " << pt.status << "\n";
                break;
            }
        return 4;
    }
    return 0;
}

int run_ness(const CommonOpts& opts, const std::optional<double>& delta, bool json) {
    cli::SweepSpec spec = load_spec(opts);
    spec.axis1.reset();
    spec.axis2.reset();
    if (delta) spec.chain.delta = *delta;
    spec.validate();
    auto result = cli::run_sweep(spec);
    const auto& pt = result.points.at(0);
    if (!pt.has_sol) throw NumericalError(pt.status);
    std::filesystem::path out(opts.out_dir);
    std::filesystem::create_directories(out);
    std::string csv = cli::kNessCsvHeader;
    cli::append_ness_rows(csv, pt.chain, pt.rates, pt.sol);
    write_text(out / "ness.csv", csv);
    if (json) write_text(out / "ness.json", cli::to_json(pt.sol).dump(2) + "\n");
    std::cout << "P_g = " << pt.sol.ground_population << ", P_ex = " << pt.sol.p_ex
              << ", MSD = " << pt.sol.msd << "\n";
    for (int n = 1; n <= pt.sol.site_populations.size(); ++n)
        std::cout << "site " << n << ": P = " << pt.sol.site_populations(n - 1)
                  << (pt.sol.rho_defined ? ", rho = " + std::to_string(pt.sol.rho(n - 1)) : "")
                  << "\n";
    return 0;
}

int run_kinetic(const CommonOpts& opts, bool json) {
    cli::SweepSpec spec = load_spec(opts);
    if (spec.solver != cli::Solver::kinetic) spec.solver = cli::Solver::kinetic;
    spec.validate();
    std::filesystem::path out(opts.out_dir);
    std::filesystem::create_directories(out);

    std::string csv = cli::kKineticCsvHeader;
    if (spec.axis1 && spec.axis1->name == "R") {
        for (double r : spec.axis1->grid.materialize()) {
            lindblad::BathRates rates = spec.rates;
            rates.r_b = r * rates.r_r;
            auto p = kinetics::KineticParams::from_bath(spec.chain.n_sites, spec.jump_length,
                                                        rates, spec.f, spec.g);
            cli::append_kinetic_rows(csv, p, kinetics::kinetic_ness(p));
        }
    } else {
        auto p = kinetics::KineticParams::from_bath(spec.chain.n_sites, spec.jump_length,
                                                    spec.rates, spec.f, spec.g);
        auto ness = kinetics::kinetic_ness(p);
        cli::append_kinetic_rows(csv, p, ness);
        if (json)
            write_text(out / "population_factors.json",
                       cli::to_json(kinetics::population_factors(p)).dump(2) + "\n");
        std::cout << "P_ex = " << ness.p_ex << "\n";
        for (int n = 1; n <= spec.chain.n_sites; ++n)
            std::cout << "site " << n << ": rho = " << ness.rho(n - 1) << "\n";
    }
    write_text(out / "kinetic.csv", csv);
    return 0;
}

int run_validate_secular(const CommonOpts& opts, const std::optional<double>& delta) {
    cli::SweepSpec spec = load_spec(opts, "validate-secular");
    if (delta) spec.chain.delta = *delta;
    if (!spec.axis1 || spec.axis1->name != "R")
        throw ConfigError("validate-secular needs axis1 = R carrying the r grid");
    double big_r = spec.rates.ratio();
    double rp_over_rr = spec.rates.r_r > 0 ? spec.rates.r_p / spec.rates.r_r : 0.0;
    auto cmp = cli::validate_secular(spec.chain, spec.trunc, spec.axis1->grid.materialize(),
                                     big_r, rp_over_rr, spec.full_dim_cap);
    std::filesystem::path out(opts.out_dir);
    std::filesystem::create_directories(out);
    write_text(out / "validate_secular.csv", cli::secular_comparison_csv(cmp));
    std::cout << "largest r with < " << 100 * cmp.tolerance
              << "% secular/full discrepancy: " << cmp.threshold_r << "\n";
    for (const auto& row : cmp.rows)
        std::cout << "r = " << row.r << "  discrepancy = " << row.max_rel_discrepancy << "  ("
                  << row.status << ")\n";
    return 0;
}

int run_recipes() {
    for (const auto& rec : cli::recipes())
        std::cout << rec.name << "  [" << rec.command << "]\n    " << rec.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonequilibrium steady states of linearly biased open Holstein chains"};
    app.require_subcommand(1);

    CommonOpts spectrum_opts, sweep_opts, ness_opts, kinetic_opts, validate_opts;
    std::optional<double> ness_delta, validate_delta;
    bool ness_json = false, kinetic_json = false;

    auto* spectrum = app.add_subcommand("spectrum", "one-exciton spectrum vs delta");
    add_common(spectrum, spectrum_opts);
    auto* ness = app.add_subcommand("ness", "steady state at a single parameter point");
    add_common(ness, ness_opts);
    ness->add_option("--delta", ness_delta, "override the bias");
    ness->add_flag("--json", ness_json, "also write ness.json");
    auto* kinetic = app.add_subcommand("kinetic", "coarse-grained kinetic model");
    add_common(kinetic, kinetic_opts);
    kinetic->add_flag("--json", kinetic_json, "also write population_factors.json");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep driven by a config or recipe");
    add_common(sweep, sweep_opts);
    auto* validate = app.add_subcommand("validate-secular",
                                        "secular vs full NESS discrepancy across rates");
    add_common(validate, validate_opts);
    validate->add_option("--delta", validate_delta, "override the bias");
    auto* recipes_cmd = app.add_subcommand("recipes", "list built-in recipes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectrum->parsed()) return run_spectrum(spectrum_opts);
        if (ness->parsed()) return run_ness(ness_opts, ness_delta, ness_json);
        if (kinetic->parsed()) return run_kinetic(kinetic_opts, kinetic_json);
        if (sweep->parsed()) return run_sweep_cmd(sweep_opts);
        if (validate->parsed()) return run_validate_secular(validate_opts, validate_delta);
        if (recipes_cmd->parsed()) return run_recipes();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FeasibilityError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
