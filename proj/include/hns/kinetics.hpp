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

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hns/lindblad.hpp"
#include "hns/numerics.hpp"

namespace hns::kinetics {

// Coarse-grained rates of the site-resolved kinetic model: nearest-neighbor
// transport k_nn, an m-site jump k_j active on resonance, recombination k_r
// and pumping k_p.  jump_length == 0 means off resonance and forces k_j == 0.
struct KineticParams {
    int n_sites = 1;
    int jump_length = 0;
    double k_nn = 0;
    double k_j = 0;
    double k_r = 0;
    double k_p = 0;

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("KineticParams: n_sites must be >= 1");
        if (jump_length < 0) throw std::invalid_argument("KineticParams: jump_length < 0");
        if (k_nn < 0 || k_j < 0 || k_r < 0 || k_p < 0)
            throw std::invalid_argument("KineticParams: rates must be >= 0");
        if ((jump_length == 0) != (k_j == 0))
            throw std::invalid_argument("KineticParams: jump_length == 0 iff k_j == 0");
    }

    // Environmental identification k_r = r_r, k_p = r_p, k_nn = r_b f, k_j = r_b g.
    static KineticParams from_bath(int n_sites, int jump_length,
                                   const lindblad::BathRates& rates, double f, double g) {
        KineticParams p;
        p.n_sites = n_sites;
        p.jump_length = jump_length;
        p.k_nn = rates.r_b * f;
        p.k_j = rates.r_b * g;
        p.k_r = rates.r_r;
        p.k_p = rates.r_p;
        p.validate();
        return p;
    }
};

// Dimensionless steady-state coefficients.  In terms of R = r_b/r_r and the
// reduced transport rates f, g these are alpha = f/(f + g + 1/R) and so on.
struct PopulationFactors {
    double alpha = 0;  // k_nn / (k_j + k_nn + k_r)
    double gamma = 0;  // k_j  / (k_j + k_nn + k_r)
    double mu = 0;     // k_j  / (k_nn + k_r)
    double nu = 0;     // k_nn / (k_nn + k_r)
    double xi = 0;     // k_j  / k_r
    double chi = 0;    // k_nn / k_r
};

inline PopulationFactors population_factors(const KineticParams& p) {
    p.validate();
    if (p.k_r <= 0) throw std::invalid_argument("population_factors: k_r must be > 0");
    PopulationFactors f;
    f.alpha = p.k_nn / (p.k_j + p.k_nn + p.k_r);
    f.gamma = p.k_j / (p.k_j + p.k_nn + p.k_r);
    f.mu = p.k_j / (p.k_nn + p.k_r);
    f.nu = p.k_nn / (p.k_nn + p.k_r);
    f.xi = p.k_j / p.k_r;
    f.chi = p.k_nn / p.k_r;
    return f;
}

// ---------------------------------------------------------------------------
// Rate matrix over {g, 1..N} (index 0 is the ground state), dP/dt = W P:
// dP_i/dt = k_nn[(1-d_iN)P_{i+1} - (1-d_i1)P_i] + d_iN k_p P_g - k_r P_i
//           + k_j[theta(N-m-i) P_{i+m} - theta(i-m-1) P_i]
// with theta(x) = 1 for x >= 0.
// ---------------------------------------------------------------------------
inline lindblad::RateMatrix kinetic_rate_matrix(const KineticParams& p) {
    p.validate();
    const int n = p.n_sites;
    const int m = p.jump_length;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto flow = [&w](int from, int to, double rate) {
        w(to, from) += rate;
        w(from, from) -= rate;
    };
    flow(0, n, p.k_p);  // pump g -> N
    for (int i = 1; i <= n; ++i) {
        flow(i, 0, p.k_r);
        if (i >= 2) flow(i, i - 1, p.k_nn);
        if (m >= 1 && i - m - 1 >= 0) flow(i, i - m, p.k_j);
    }
    return lindblad::RateMatrix{std::move(w)};
}

// ---------------------------------------------------------------------------
// Analytic steady states, one closed form per (N, m) regime.
// ---------------------------------------------------------------------------

struct KineticNess {
    Eigen::VectorXd rho;  // normalized one-exciton populations, index 0 = site 1
    double p_ex = 0;
    double p_g = 0;
};

namespace detail {

// Top-site population: the jump out-flow is gated off when the jump does not
// fit in the chain (m >= N), matching the rate equations exactly.
inline double rho_top(const KineticParams& p) {
    const bool jump_out_of_top = p.jump_length >= 1 && p.n_sites >= p.jump_length + 1;
    return p.k_r / (p.k_nn + (jump_out_of_top ? p.k_j : 0.0) + p.k_r);
}

}  // namespace detail

inline KineticNess kinetic_ness(const KineticParams& p) {
    p.validate();
    if (p.k_r <= 0) throw std::invalid_argument("kinetic_ness: k_r must be > 0");
    const int n = p.n_sites;
    const int m = p.jump_length;
    const PopulationFactors f = population_factors(p);

    KineticNess out;
    out.p_ex = p.k_p / (p.k_r + p.k_p);
    out.p_g = p.k_r / (p.k_r + p.k_p);
    out.rho.resize(n);

    auto rho = [&out](int site) -> double& { return out.rho(site - 1); };
    if (n == 1) {
        rho(1) = 1.0;
        return out;
    }
    rho(n) = detail::rho_top(p);
    if (m == 0 || m >= n) {
        // No jump fits: plain downhill chain (also the k_j = 0 closed form
        // rho_n = nu^{N-n} rho_N, rho_1 = chi nu^{N-2} rho_N).
        for (int site = n - 1; site >= 2; --site) rho(site) = f.nu * rho(site + 1);
        rho(1) = f.chi * rho(2);
        return out;
    }
    if (n > 2 * m) {
        for (int site = n - 1; site >= 1; --site) {
            if (site > n - m)
                rho(site) = f.alpha * rho(site + 1);
            else if (site > m)
                rho(site) = f.gamma * rho(site + m) + f.alpha * rho(site + 1);
            else if (site > 1)
                rho(site) = f.mu * rho(site + m) + f.nu * rho(site + 1);
            else
                rho(site) = f.xi * rho(site + m) + f.chi * rho(site + 1);
        }
        return out;
    }
    // 2m >= N > m
    for (int site = n - 1; site >= 1; --site) {
        if (site > m)
            rho(site) = f.alpha * rho(site + 1);
        else if (site > n - m)
            rho(site) = f.nu * rho(site + 1);
        else if (site > 1)
            rho(site) = f.mu * rho(site + m) + f.nu * rho(site + 1);
        else
            rho(site) = f.xi * rho(site + m) + f.chi * rho(site + 1);
    }
    return out;
}

// Top `count` normalized populations of the semi-infinite chain (sites
// ... N-1, N), ordered from the lowest returned site to the top.  The
// recursion has no bottom-edge factors; weights decay geometrically, so a
// finite window of length >= 2m + 30 captures the distribution to a tail that
// is bounded by (alpha + gamma)^{count}.
inline Eigen::VectorXd semi_infinite_rho(const KineticParams& p, int count) {
    p.validate();
    if (p.k_r <= 0) throw std::invalid_argument("semi_infinite_rho: k_r must be > 0");
    if (count < 1) throw std::invalid_argument("semi_infinite_rho: count must be >= 1");
    const int m = p.jump_length;
    const PopulationFactors f = population_factors(p);

    Eigen::VectorXd rho(count);  // rho(count-1) is the top site
    auto at = [&rho, count](int depth) -> double& { return rho(count - 1 - depth); };
    at(0) = p.k_r / (p.k_nn + p.k_j + p.k_r);
    for (int depth = 1; depth < count; ++depth) {
        double val = f.alpha * at(depth - 1);
        if (m >= 1 && depth >= m) val += f.gamma * at(depth - m);
        at(depth) = val;
    }
    return rho;
}

// ---------------------------------------------------------------------------
// R-dependence table
// ---------------------------------------------------------------------------

struct KineticLimits {
    std::vector<double> r_values;
    Eigen::MatrixXd rho;  // row per R, column per site
    bool rho_top_monotone_decreasing = true;
};

// Evaluates the steady state along an R grid at fixed f, g (k_r is held at 1,
// k_p at 1e-4; the normalized populations depend on the bath only through R).
inline KineticLimits kinetic_limits(int n_sites, int jump_length, double f, double g,
                                    const std::vector<double>& r_grid) {
    if (f <= 0) throw std::invalid_argument("kinetic_limits: f must be > 0");
    if ((jump_length == 0) != (g == 0))
        throw std::invalid_argument("kinetic_limits: jump_length == 0 iff g == 0");
    KineticLimits out;
    out.r_values = r_grid;
    out.rho.resize(r_grid.size(), n_sites);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        double r = r_grid[i];
        if (r <= 0) throw std::invalid_argument("kinetic_limits: R must be > 0");
        lindblad::BathRates rates{r, 1.0, 1e-4};
        KineticParams p = KineticParams::from_bath(n_sites, jump_length, rates, f, g);
        out.rho.row(i) = kinetic_ness(p).rho.transpose();
        if (i > 0 && out.rho(i, n_sites - 1) > out.rho(i - 1, n_sites - 1) + 1e-15)
            out.rho_top_monotone_decreasing = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transport-rate estimation from coarse-grained trajectories
// ---------------------------------------------------------------------------

struct RateFit {
    double k_nn_hat = 0;
    double k_j_hat = 0;
    double f_hat = 0;  // k_nn_hat / r_b
    double g_hat = 0;  // k_j_hat / r_b
    double residual = 0;
    bool well_conditioned = true;
};

namespace detail {

// Mean squared trajectory mismatch for rates (k_nn, k_j); populations ordered
// {g, 1..N} as in kinetic_rate_matrix.
inline double fit_cost(const KineticParams& base, double k_nn, double k_j,
                       const std::vector<double>& times,
                       const std::vector<Eigen::VectorXd>& traj) {
    KineticParams p = base;
    p.k_nn = k_nn;
    p.k_j = (base.jump_length >= 1) ? k_j : 0.0;
    if (p.k_j == 0) p.jump_length = 0;  // zero jump rate is the off-resonance generator
    Eigen::MatrixXd w = kinetic_rate_matrix(p).w;
    double cost = 0;
    const Eigen::VectorXd& p0 = traj.front();
    for (std::size_t s = 1; s < times.size(); ++s) {
        Eigen::MatrixXd prop = (w * (times[s] - times[0])).exp();
        cost += (prop * p0 - traj[s]).squaredNorm();
    }
    return cost / double(times.size() - 1);
}

}  // namespace detail

// Least-squares fit of (k_nn, k_j) to site-population trajectories sampled at
// `times` (populations ordered {g, 1..N}); k_r, k_p, N and m are taken from
// `fixed`.  Returns reduced rates via f = k_nn/r_b, g = k_j/r_b.
inline RateFit infer_kinetic_rates(const std::vector<double>& times,
                                   const std::vector<Eigen::VectorXd>& trajectory,
                                   const KineticParams& fixed, double r_b,
                                   double residual_threshold = 1e-2) {
    if (times.size() != trajectory.size() || times.size() < 3)
        throw std::invalid_argument("infer_kinetic_rates: need >= 3 aligned samples");
    if (r_b <= 0) throw std::invalid_argument("infer_kinetic_rates: r_b must be > 0");

    const bool with_jump = fixed.jump_length >= 1;
    auto cost = [&](double a, double b) {
        return detail::fit_cost(fixed, a * a, with_jump ? b * b : 0.0, times, trajectory);
    };

    // Coarse log-grid scan, then Nelder-Mead in sqrt-rate coordinates so the
    // rates stay non-negative and zero is reachable.
    double best_a = std::sqrt(r_b), best_b = 0, best_cost = cost(std::sqrt(r_b), 0);
    for (int ia = -5; ia <= 3; ++ia) {
        double a = std::sqrt(r_b * std::pow(10.0, ia));
        for (int ib = -6; ib <= 3; ++ib) {
            double b = with_jump ? std::sqrt(r_b * std::pow(10.0, ib)) : 0.0;
            double c = cost(a, b);
            if (c < best_cost) {
                best_cost = c;
                best_a = a;
                best_b = b;
            }
            if (!with_jump) break;
        }
    }

    using Point = std::pair<Eigen::Vector2d, double>;
    auto eval = [&](const Eigen::Vector2d& x) { return cost(x(0), x(1)); };
    std::vector<Point> simplex;
    Eigen::Vector2d x0(best_a, best_b);
    simplex.push_back({x0, eval(x0)});
    for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d x = x0;
        x(k) = (x(k) != 0) ? 1.5 * x(k) : 0.3 * best_a + 1e-12;
        simplex.push_back({x, eval(x)});
    }
    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Point& p, const Point& q) { return p.second < q.second; });
    };
    order();
    for (int it = 0; it < 400; ++it) {
        Eigen::Vector2d centroid = 0.5 * (simplex[0].first + simplex[1].first);
        Eigen::Vector2d xr = centroid + (centroid - simplex[2].first);
        double fr = eval(xr);
        if (fr < simplex[0].second) {
            Eigen::Vector2d xe = centroid + 2.0 * (centroid - simplex[2].first);
            double fe = eval(xe);
            simplex[2] = fe < fr ? Point{xe, fe} : Point{xr, fr};
        } else if (fr < simplex[1].second) {
            simplex[2] = {xr, fr};
        } else {
            Eigen::Vector2d xc = centroid + 0.5 * (simplex[2].first - centroid);
            double fc = eval(xc);
            if (fc < simplex[2].second) {
                simplex[2] = {xc, fc};
            } else {
                for (int k = 1; k < 3; ++k) {
                    simplex[k].first = simplex[0].first + 0.5 * (simplex[k].first - simplex[0].first);
                    simplex[k].second = eval(simplex[k].first);
                }
            }
        }
        order();
        if (std::abs(simplex[2].second - simplex[0].second) <=
            1e-14 * (std::abs(simplex[0].second) + 1e-300))
            break;
    }

    RateFit fit;
    fit.k_nn_hat = simplex[0].first(0) * simplex[0].first(0);
    fit.k_j_hat = with_jump ? simplex[0].first(1) * simplex[0].first(1) : 0.0;
    fit.f_hat = fit.k_nn_hat / r_b;
    fit.g_hat = fit.k_j_hat / r_b;
    fit.residual = std::sqrt(simplex[0].second);
    fit.well_conditioned = fit.residual <= residual_threshold;
    return fit;
}

}  // namespace hns::kinetics
