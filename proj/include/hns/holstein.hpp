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
#include <Eigen/SparseCore>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "hns/fockspace.hpp"
#include "hns/numerics.hpp"

namespace hns::holstein {

using fock::SpMat;

// Closed-system parameters of the linearly biased chain.  All energies are in
// units of the bosonic quantum (omega == 1): delta is the per-site bias,
// lambda the exciton-phonon coupling, j_hop the nearest-neighbor coupling and
// eps10 the overall gap of the one-exciton manifold.
struct ChainParams {
    int n_sites = 1;
    double delta = 0.5;
    double lambda = 0.0;
    double j_hop = 0.0;
    double eps10 = 0.0;

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("ChainParams: n_sites must be >= 1");
        if (delta < 0) throw std::invalid_argument("ChainParams: delta must be >= 0");
    }

    // Advisory only; strong-bias analyses assume j_hop/delta << 1.
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (delta > 0 && std::abs(j_hop) / delta > 0.2)
            w.push_back("j_hop/delta = " + std::to_string(std::abs(j_hop) / delta) +
                        " is outside the strong-bias regime; Wannier-Stark arguments may fail");
        return w;
    }
};

// H = eps10 + sum_n [n*delta + lambda (a_n^+ + a_n)] |n><n| + sum_n a_n^+ a_n
//       + J sum_n (|n><n-1| + h.c.)
// on the enumerated zero/one-exciton basis.  The ground-state energy is 0 and
// the ground state is not coupled to the one-exciton manifold.
inline SpMat build_hamiltonian(const ChainParams& p, const fock::Basis& basis) {
    p.validate();
    if (basis.n_sites() != p.n_sites)
        throw std::invalid_argument("build_hamiltonian: basis/params site-count mismatch");

    const int d = basis.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * d);
    for (int i = 0; i < d; ++i) {
        const auto& s = basis.state(i);
        if (s.exciton == 0) continue;  // |g> stays at energy 0
        const int n = s.exciton;
        trips.emplace_back(i, i, p.eps10 + n * p.delta + s.total_quanta());

        // lambda (a_n^+ + a_n) on the mode under the exciton
        const int mode = n - 1;
        if (p.lambda != 0) {
            int lo = basis.lowered_index(i, mode);
            if (lo >= 0) {
                double amp = p.lambda * std::sqrt(double(s.occupations[mode]));
                trips.emplace_back(lo, i, amp);
                trips.emplace_back(i, lo, amp);
            }
        }
        // J |n><n-1| + h.c., boson configuration unchanged
        if (p.j_hop != 0 && n >= 2) {
            fock::BasisState t = s;
            t.exciton = n - 1;
            int j = basis.index_of(t);
            if (j >= 0) {
                trips.emplace_back(j, i, p.j_hop);
                trips.emplace_back(i, j, p.j_hop);
            }
        }
    }
    SpMat h(d, d);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

// Bessel function of the first kind by its ascending series, valid for the
// small arguments 2J/delta that arise in the strong-bias regime.
inline double bessel_first_kind(int order, double argument) {
    if (std::abs(argument) > 2.0)
        throw std::domain_error("bessel_first_kind: |argument| must be <= 2");
    const int n = std::abs(order);
    const double half = 0.5 * argument;

    double term = 1.0;  // (z/2)^n / n!
    for (int i = 1; i <= n; ++i) term *= half / i;
    double sum = term;
    for (int k = 1; k <= 25; ++k) {
        term *= -(half * half) / (double(k) * double(k + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(sum), 1e-30)) break;
    }
    if (order < 0 && (n % 2 == 1)) sum = -sum;  // J_{-n} = (-1)^n J_n
    return sum;
}

// Site amplitudes of the Wannier-Stark state centered on `site`, restricted to
// the finite chain and renormalized.  Component i is J_{i-site}(2J/delta).
inline Eigen::VectorXd ws_coefficients(int site, const ChainParams& p) {
    p.validate();
    if (p.delta <= 0) throw std::domain_error("ws_coefficients: delta must be > 0");
    if (site < 1 || site > p.n_sites)
        throw std::out_of_range("ws_coefficients: site out of range");
    const double z = 2.0 * p.j_hop / p.delta;
    Eigen::VectorXd v(p.n_sites);
    for (int i = 1; i <= p.n_sites; ++i) v(i - 1) = bessel_first_kind(i - site, z);
    double norm = v.norm();
    if (norm == 0) throw NumericalError("ws_coefficients: zero vector");
    return v / norm;
}

// Leading-order magnitude of the phonon-mediated hop between sites i and k:
// lambda * (J/delta)^|i-k|.  Used for resonance-width heuristics and tests,
// not for dynamics.
inline double ws_coupling_scale(int i, int k, const ChainParams& p) {
    p.validate();
    if (p.delta <= 0) throw std::domain_error("ws_coupling_scale: delta must be > 0");
    return std::abs(p.lambda) * std::pow(std::abs(p.j_hop) / p.delta, std::abs(i - k));
}

// Full orthonormal eigendecomposition, energies ascending.
struct EigenSystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;  // columns are eigenvectors over basis->states()
    std::shared_ptr<const fock::Basis> basis;

    int size() const { return static_cast<int>(energies.size()); }

    // Index of the decoupled electronic ground state in the eigen ordering.
    int ground_index() const {
        int best = 0;
        double best_overlap = 0;
        for (int k = 0; k < size(); ++k) {
            double o = std::abs(vectors(0, k));
            if (o > best_overlap) {
                best_overlap = o;
                best = k;
            }
        }
        return best;
    }
};

inline EigenSystem eigensystem(const SpMat& h, std::shared_ptr<const fock::Basis> basis) {
    Eigen::MatrixXd dense(h);
    double scale = std::max(dense.cwiseAbs().maxCoeff(), 1e-300);
    if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eigensystem: matrix is not symmetric");
    if (basis && dense.rows() != basis->size())
        throw std::invalid_argument("eigensystem: basis/matrix size mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensystem: solver failed");
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors(), std::move(basis)};
    // Deterministic sign: largest-magnitude component positive.
    for (int k = 0; k < es.size(); ++k) {
        Eigen::Index imax;
        es.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        if (es.vectors(imax, k) < 0) es.vectors.col(k) = -es.vectors.col(k);
    }
    return es;
}

// Eigensystem restricted to the one-exciton block (the decoupled ground state
// removed).  Used for spectra and eigenstate spatial profiles.
inline EigenSystem one_exciton_eigensystem(const ChainParams& p,
                                           std::shared_ptr<const fock::Basis> basis) {
    EigenSystem full = eigensystem(build_hamiltonian(p, *basis), basis);
    const int g = full.ground_index();
    const int n = full.size();
    EigenSystem out;
    out.basis = full.basis;
    out.energies.resize(n - 1);
    out.vectors.resize(full.vectors.rows(), n - 1);
    int c = 0;
    for (int k = 0; k < n; ++k) {
        if (k == g) continue;
        out.energies(c) = full.energies(k);
        out.vectors.col(c) = full.vectors.col(k);
        ++c;
    }
    return out;
}

// Exciton weight of each eigenvector on each site: entry (k, n-1) is
// sum_m |<n; m|psi_k>|^2.  The ground eigenvector yields an all-zero row.
inline Eigen::MatrixXd site_weight_matrix(const EigenSystem& es) {
    if (!es.basis) throw std::invalid_argument("site_weight_matrix: missing basis");
    const auto& basis = *es.basis;
    const int n_sites = basis.n_sites();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(es.size(), n_sites);
    for (int k = 0; k < es.size(); ++k)
        for (int i = 0; i < basis.size(); ++i) {
            int site = basis.state(i).exciton;
            if (site > 0) w(k, site - 1) += es.vectors(i, k) * es.vectors(i, k);
        }
    return w;
}

// Same, but rejects eigensystems that still contain the ground vector, whose
// row would sum to 0 instead of 1.
inline Eigen::MatrixXd eigenstate_site_populations(const EigenSystem& es) {
    Eigen::MatrixXd w = site_weight_matrix(es);
    for (int k = 0; k < w.rows(); ++k)
        if (std::abs(w.row(k).sum() - 1.0) > 1e-10)
            throw std::invalid_argument(
                "eigenstate_site_populations: eigenvector " + std::to_string(k) +
                " is not a one-exciton state (row sum " + std::to_string(w.row(k).sum()) + ")");
    return w;
}

// Inverse participation ratio of a site probability vector, in [1, N].
inline double ipr(const Eigen::VectorXd& site_weights) {
    double sum = 0, sum2 = 0;
    for (Eigen::Index i = 0; i < site_weights.size(); ++i) {
        if (site_weights(i) < -1e-12)
            throw std::invalid_argument("ipr: negative weight");
        double w = std::max(site_weights(i), 0.0);
        sum += w;
        sum2 += w * w;
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw std::invalid_argument("ipr: weights must sum to 1");
    return 1.0 / sum2;
}

// ---------------------------------------------------------------------------
// Spectrum sweeps and avoided-crossing detection
// ---------------------------------------------------------------------------

// Lowest one-exciton levels along a bias grid.  vectors[i] holds the kept
// eigenvector columns at grid point i (needed for adiabatic tracking).
struct SpectrumSweep {
    std::vector<double> deltas;
    Eigen::MatrixXd energies;  // row = grid point, col = level (ascending)
    std::vector<Eigen::MatrixXd> vectors;
    ChainParams base;
};

inline SpectrumSweep spectrum_sweep(const ChainParams& base,
                                    std::shared_ptr<const fock::Basis> basis,
                                    const std::vector<double>& delta_grid, int n_levels,
                                    bool keep_vectors = true, int threads = 1) {
    if (delta_grid.empty()) throw std::invalid_argument("spectrum_sweep: empty grid");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (delta_grid[i] <= 0)
            throw std::invalid_argument("spectrum_sweep: all grid deltas must be > 0");
        if (i > 0 && delta_grid[i] <= delta_grid[i - 1])
            throw std::invalid_argument("spectrum_sweep: grid must be strictly increasing");
    }
    const int d1 = basis->size() - 1;  // one-exciton block size
    if (n_levels < 1 || n_levels > d1)
        throw std::invalid_argument("spectrum_sweep: n_levels out of range");

    SpectrumSweep sweep;
    sweep.deltas = delta_grid;
    sweep.base = base;
    sweep.energies.resize(delta_grid.size(), n_levels);
    sweep.vectors.resize(keep_vectors ? delta_grid.size() : 0);

    num::parallel_for(delta_grid.size(), threads, [&](std::size_t i) {
        ChainParams p = base;
        p.delta = delta_grid[i];
        EigenSystem es = one_exciton_eigensystem(p, basis);
        sweep.energies.row(i) = es.energies.head(n_levels).transpose();
        if (keep_vectors) sweep.vectors[i] = es.vectors.leftCols(n_levels);
    });
    return sweep;
}

// Resonance found as a local minimum of a tracked-level-pair gap.
struct CrossingReport {
    double delta_star = 0;  // grid location of the minimum
    double gap = 0;         // minimum splitting
    int jump_length = 0;    // denominator m of the nearest rational j/m
    int lower_level = 0;    // tracked index of the lower level of the pair
};

struct CrossingOptions {
    int max_denominator = 4;
    double ceiling_factor = 10.0;  // accept gap <= factor * lambda (J/delta)^m
};

// declared below
struct TrackedLevels;
inline TrackedLevels track_levels(const SpectrumSweep& sweep);

// A crossing is a local minimum (ties on the right allowed, so exact
// degeneracies that plateau still register once) of a level-pair gap along
// the grid, with the levels continued adiabatically by eigenvector overlap.
// Tracking rather than sorted adjacency keeps a crossing visible when
// near-degenerate spectator levels sit between the coupled pair.  Reports are
// kept when the gap is at most ceiling_factor * lambda (J/delta*)^m with m
// the inferred jump length (plus a rounding floor so unperturbed crossings
// with gap ~ 0 survive a lambda = 0 ceiling).
std::vector<CrossingReport> detect_avoided_crossings(const SpectrumSweep& sweep,
                                                     const CrossingOptions& opt = {});

// Adiabatic continuation of levels across the sweep by maximal eigenvector
// overlap between consecutive grid points.
struct TrackedLevels {
    // column_of_level[i][l] = column of sweep.energies at grid point i that
    // continues tracked level l.
    std::vector<std::vector<int>> column_of_level;
    // worst |overlap| seen when matching level l into grid point i (1 = clean).
    Eigen::MatrixXd match_quality;

    double energy(const SpectrumSweep& sweep, std::size_t grid, int level) const {
        return sweep.energies(grid, column_of_level[grid][level]);
    }
};

inline TrackedLevels track_levels(const SpectrumSweep& sweep) {
    if (sweep.vectors.empty())
        throw std::invalid_argument("track_levels: sweep was built without vectors");
    const std::size_t g = sweep.deltas.size();
    const int levels = static_cast<int>(sweep.energies.cols());

    TrackedLevels tracked;
    tracked.column_of_level.assign(g, std::vector<int>(levels));
    tracked.match_quality = Eigen::MatrixXd::Ones(g, levels);
    for (int l = 0; l < levels; ++l) tracked.column_of_level[0][l] = l;

    for (std::size_t i = 1; i < g; ++i) {
        Eigen::MatrixXd overlap =
            (sweep.vectors[i - 1].transpose() * sweep.vectors[i]).cwiseAbs();
        // Greedy assignment by descending overlap.
        std::vector<std::tuple<double, int, int>> cand;
        cand.reserve(levels * levels);
        for (int r = 0; r < levels; ++r)
            for (int c = 0; c < levels; ++c) cand.emplace_back(overlap(r, c), r, c);
        std::sort(cand.begin(), cand.end(),
                  [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
        std::vector<int> col_of_prev_col(levels, -1);
        std::vector<bool> used(levels, false);
        int assigned = 0;
        std::vector<double> quality(levels, 0.0);
        for (const auto& [o, r, c] : cand) {
            if (col_of_prev_col[r] >= 0 || used[c]) continue;
            col_of_prev_col[r] = c;
            used[c] = true;
            quality[r] = o;
            if (++assigned == levels) break;
        }
        for (int l = 0; l < levels; ++l) {
            int prev = tracked.column_of_level[i - 1][l];
            tracked.column_of_level[i][l] = col_of_prev_col[prev];
            tracked.match_quality(i, l) = quality[prev];
        }
    }
    return tracked;
}

inline std::vector<CrossingReport> detect_avoided_crossings(const SpectrumSweep& sweep,
                                                            const CrossingOptions& opt) {
    const Eigen::Index g = sweep.energies.rows();
    const int levels = static_cast<int>(sweep.energies.cols());
    if (g < 3) throw std::invalid_argument("detect_avoided_crossings: need >= 3 grid points");
    TrackedLevels tracked = track_levels(sweep);

    Eigen::MatrixXd e(g, levels);
    for (Eigen::Index i = 0; i < g; ++i)
        for (int l = 0; l < levels; ++l) e(i, l) = tracked.energy(sweep, i, l);
    const double rounding_floor = 1e-12 * std::max(e.cwiseAbs().maxCoeff(), 1.0);

    std::vector<CrossingReport> out;
    for (int a = 0; a < levels; ++a) {
        for (int b = a + 1; b < levels; ++b) {
            for (Eigen::Index i = 1; i + 1 < g; ++i) {
                double gm = std::abs(e(i - 1, a) - e(i - 1, b));
                double g0 = std::abs(e(i, a) - e(i, b));
                double gp = std::abs(e(i + 1, a) - e(i + 1, b));
                if (!(g0 < gm && g0 <= gp)) continue;
                double delta_star = sweep.deltas[i];
                auto rational = num::nearest_rational(delta_star, opt.max_denominator);
                if (rational.num == 0) continue;  // not a jump resonance
                int m = static_cast<int>(rational.den);
                ChainParams p = sweep.base;
                p.delta = delta_star;
                double ceiling = opt.ceiling_factor * ws_coupling_scale(0, m, p);
                if (g0 <= std::max(ceiling, rounding_floor))
                    out.push_back({delta_star, g0, m, std::min(a, b)});
            }
        }
    }
    return out;
}

// Central-difference slope dE/d(delta) of a tracked level at interior points.
inline Eigen::MatrixXd tracked_slopes(const SpectrumSweep& sweep, const TrackedLevels& tracked) {
    const std::size_t g = sweep.deltas.size();
    const int levels = static_cast<int>(sweep.energies.cols());
    Eigen::MatrixXd slopes = Eigen::MatrixXd::Constant(g, levels, std::nan(""));
    for (std::size_t i = 1; i + 1 < g; ++i)
        for (int l = 0; l < levels; ++l) {
            double e_prev = tracked.energy(sweep, i - 1, l);
            double e_next = tracked.energy(sweep, i + 1, l);
            slopes(i, l) = (e_next - e_prev) / (sweep.deltas[i + 1] - sweep.deltas[i - 1]);
        }
    return slopes;
}

}  // namespace hns::holstein
