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
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hns/fockspace.hpp"
#include "hns/holstein.hpp"
#include "hns/numerics.hpp"

namespace hns::lindblad {

using fock::SpMat;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;

// Environment rates: bosonic dissipation r_b, exciton recombination r_r and
// incoherent pumping r_p, all in units of omega.
struct BathRates {
    double r_b = 0;
    double r_r = 0;
    double r_p = 0;

    void validate() const {
        if (r_b < 0 || r_r < 0 || r_p < 0)
            throw std::invalid_argument("BathRates: rates must be >= 0");
    }
    double max_rate() const { return std::max({r_b, r_r, r_p}); }
    // R = r_b / r_r, the dimensionless exciton-lifetime measure.
    double ratio() const {
        if (r_r <= 0) throw std::domain_error("BathRates: R undefined for r_r == 0");
        return r_b / r_r;
    }
    // Single-exciton treatment assumes pumping is the slowest process.
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (r_r > 0 && r_p / r_r > 0.1)
            w.push_back("r_p/r_r = " + std::to_string(r_p / r_r) +
                        " > 0.1; single-exciton restriction is questionable");
        return w;
    }
};

// One dissipation channel.  Most channels carry a single jump operator; the
// recombination channels carry one element per occupation configuration (see
// fock::recombination_channel).
struct JumpChannel {
    std::string label;
    std::vector<SpMat> ops;
};

// N bosonic dissipators sqrt(r_b) a_n, N recombination channels built from
// sqrt(r_r) |g><n;m|, and one pump sqrt(r_p) |N;0><g|: 2N+1 channels.
inline std::vector<JumpChannel> build_lindblad_ops(const fock::Basis& basis,
                                                   const BathRates& rates) {
    rates.validate();
    const int n = basis.n_sites();
    std::vector<JumpChannel> channels;
    channels.reserve(2 * n + 1);
    const double sb = std::sqrt(rates.r_b);
    const double sr = std::sqrt(rates.r_r);
    const double sp = std::sqrt(rates.r_p);
    for (int site = 1; site <= n; ++site) {
        JumpChannel ch{"b" + std::to_string(site), {}};
        ch.ops.push_back((sb * fock::boson_annihilator(basis, site)).eval());
        channels.push_back(std::move(ch));
    }
    for (int site = 1; site <= n; ++site) {
        JumpChannel ch{"r" + std::to_string(site), {}};
        for (auto& l : fock::recombination_channel(basis, site))
            ch.ops.push_back((sr * l).eval());
        channels.push_back(std::move(ch));
    }
    JumpChannel pump{"p", {}};
    pump.ops.push_back(
        (sp * SpMat(fock::exciton_annihilator(basis, n).transpose())).eval());
    channels.push_back(std::move(pump));
    return channels;
}

inline double sup_jump_element(const std::vector<JumpChannel>& channels) {
    double m = 0;
    for (const auto& ch : channels)
        for (const auto& l : ch.ops)
            for (int k = 0; k < l.outerSize(); ++k)
                for (SpMat::InnerIterator it(l, k); it; ++it)
                    m = std::max(m, std::abs(it.value()));
    return m;
}

// ---------------------------------------------------------------------------
// Secular rate matrix and its steady state
// ---------------------------------------------------------------------------

// Classical generator over energy eigenstates, convention dP/dt = W P:
// W_mn = sum_y |L_y,mn|^2 off the diagonal, columns summing to zero.
struct RateMatrix {
    Eigen::MatrixXd w;

    void check_invariants() const {
        const double scale = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
        for (Eigen::Index n = 0; n < w.cols(); ++n) {
            if (std::abs(w.col(n).sum()) > 1e-12 * scale)
                throw NumericalError("RateMatrix: column " + std::to_string(n) +
                                     " does not sum to zero");
            for (Eigen::Index m = 0; m < w.rows(); ++m)
                if (m != n && w(m, n) < 0)
                    throw NumericalError("RateMatrix: negative off-diagonal rate");
        }
    }
};

inline RateMatrix secular_rate_matrix(const holstein::EigenSystem& es,
                                      const std::vector<JumpChannel>& channels) {
    const int d = es.size();
    const Eigen::MatrixXd& v = es.vectors;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);

    // Single-entry jump elements val |r><c| transform to outer products of
    // eigenvector rows; group them by source row to keep this O(d^2).
    std::map<int, Eigen::VectorXd> single_by_row;
    for (const auto& ch : channels) {
        for (const auto& l : ch.ops) {
            if (l.rows() != d || l.cols() != d)
                throw std::invalid_argument("secular_rate_matrix: dimension mismatch");
            if (l.nonZeros() == 0) continue;
            if (l.nonZeros() == 1) {
                for (int k = 0; k < l.outerSize(); ++k)
                    for (SpMat::InnerIterator it(l, k); it; ++it) {
                        auto [slot, inserted] =
                            single_by_row.try_emplace(static_cast<int>(it.row()),
                                                      Eigen::VectorXd::Zero(d));
                        slot->second += (it.value() * it.value()) *
                                        v.row(it.col()).transpose().cwiseAbs2();
                    }
            } else {
                Eigen::MatrixXd le = v.transpose() * (l * v);
                s += le.cwiseAbs2();
            }
        }
    }
    for (const auto& [row, acc] : single_by_row)
        s += v.row(row).transpose().cwiseAbs2() * acc.transpose();

    RateMatrix rm{s};
    rm.w -= s.colwise().sum().asDiagonal().toDenseMatrix();
    return rm;
}

// Normalized kernel of W (LU extraction, singular-value uniqueness check).
// Populations below -1e-10 signal a numerical failure; smaller negatives are
// clamped to zero.
inline Eigen::VectorXd ness_secular(const RateMatrix& rm, num::KernelReport* report = nullptr) {
    rm.check_invariants();
    Eigen::VectorXd p = num::unique_null_vector(rm.w, 1e-8, report);
    double total = p.sum();
    if (std::abs(total) < 1e-300) throw NumericalError("ness_secular: kernel sums to zero");
    p /= total;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -1e-10)
            throw NumericalError("ness_secular: negative population " + std::to_string(p(i)));
        if (p(i) < 0) p(i) = 0;
    }
    p /= p.sum();
    const double scale = std::max(rm.w.cwiseAbs().maxCoeff(), 1e-300);
    double residual = (rm.w * p).cwiseAbs().maxCoeff();
    if (residual > 1e-10 * scale)
        throw NumericalError("ness_secular: residual " + std::to_string(residual / scale));
    return p;
}

// ---------------------------------------------------------------------------
// Full Liouvillian (column-stacking convention)
// ---------------------------------------------------------------------------

// vec(rho') = [-i(I (x) H - H^T (x) I)
//              + sum_y (conj(L) (x) L - 1/2 I (x) L^+L - 1/2 (L^+L)^T (x) I)] vec(rho)
inline SpMatC full_liouvillian(const SpMat& h, const std::vector<JumpChannel>& channels,
                               int dim_cap = 200) {
    const int d = static_cast<int>(h.rows());
    if (d > dim_cap)
        throw FeasibilityError("full_liouvillian: dimension " + std::to_string(d) +
                               " exceeds the cap " + std::to_string(dim_cap) +
                               "; use the secular path");
    SpMat eye(d, d);
    eye.setIdentity();

    const std::complex<double> im(0.0, 1.0);
    SpMatC liou(d * d, d * d);
    liou = (-im) * Eigen::kroneckerProduct(eye, h).eval().cast<std::complex<double>>() +
           im * Eigen::kroneckerProduct(SpMat(h.transpose()), eye)
                    .eval()
                    .cast<std::complex<double>>();
    for (const auto& ch : channels) {
        for (const auto& l : ch.ops) {
            if (l.rows() != d) throw std::invalid_argument("full_liouvillian: dimension mismatch");
            SpMat ldl = SpMat(l.transpose()) * l;
            liou += Eigen::kroneckerProduct(l, l).eval().cast<std::complex<double>>();
            liou -= 0.5 * Eigen::kroneckerProduct(eye, ldl).eval().cast<std::complex<double>>();
            liou -= 0.5 * Eigen::kroneckerProduct(SpMat(ldl.transpose()), eye)
                              .eval()
                              .cast<std::complex<double>>();
        }
    }
    liou.makeCompressed();
    return liou;
}

// Steady-state density matrix: Hermitian, unit trace, eigenvalues >= -1e-8
// (small negatives clamped).  Throws NonUniqueSteadyState on degenerate
// kernels (e.g. a closed system).
inline Eigen::MatrixXcd ness_full(const SpMatC& liou, std::size_t dense_entry_cap = 4'000'000) {
    const int d = static_cast<int>(std::llround(std::sqrt(double(liou.rows()))));
    Eigen::VectorXcd x = num::steady_state_vector(liou, d, dense_entry_cap);
    Eigen::MatrixXcd rho(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) rho(r, c) = x(c * d + r);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-8)
            throw NumericalError("ness_full: negative eigenvalue " + std::to_string(ev(i)));
        if (ev(i) < 0) ev(i) = 0;
    }
    rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    std::complex<double> tr = rho.trace();
    if (std::abs(tr) < 1e-300) throw NumericalError("ness_full: zero trace");
    rho /= tr;
    return rho;
}

// ---------------------------------------------------------------------------
// Minibands and the partial-secular generator
// ---------------------------------------------------------------------------

// Partition of the (ascending) eigenstates into clusters separated by energy
// gaps of at least `threshold` (single linkage).
struct MinibandPartition {
    std::vector<std::vector<int>> groups;
    double threshold = 0;
    std::vector<int> band_of;

    static MinibandPartition cluster(const Eigen::VectorXd& energies, double threshold) {
        MinibandPartition part;
        part.threshold = threshold;
        const int n = static_cast<int>(energies.size());
        part.band_of.assign(n, 0);
        std::vector<int> current{0};
        for (int i = 1; i < n; ++i) {
            if (energies(i) - energies(i - 1) < threshold) {
                current.push_back(i);
            } else {
                part.groups.push_back(std::move(current));
                current = {i};
            }
            part.band_of[i] = static_cast<int>(part.groups.size());
        }
        if (!current.empty()) part.groups.push_back(std::move(current));
        return part;
    }

    void validate(int n_states) const {
        std::vector<int> seen(n_states, 0);
        for (const auto& g : groups)
            for (int i : g) {
                if (i < 0 || i >= n_states)
                    throw std::invalid_argument("MinibandPartition: index out of range");
                if (seen[i]++)
                    throw std::invalid_argument("MinibandPartition: overlapping groups");
            }
        for (int i = 0; i < n_states; ++i)
            if (!seen[i]) throw std::invalid_argument("MinibandPartition: missing state");
    }
};

// Bands must stand off from each other by more than the dissipation scale;
// the geometric mean of max rate and the bosonic quantum is a robust default.
inline double default_band_threshold(const BathRates& rates) {
    double r = rates.max_rate();
    return r > 0 ? std::sqrt(r) : 0.0;
}

// Generator on populations plus intra-band coherences.  Inter-band transfer
// stays secular; within a band the full sandwich and decay couplings are kept,
// including the (L^+L) elements r_b (N_n)_ik + r_r (M_n)_ik.
struct PartialSecularGenerator {
    Eigen::MatrixXcd op;                     // action on the packed state
    std::vector<std::pair<int, int>> kept;   // packed index -> (i, j) eigenpair
    std::vector<std::vector<int>> index_of;  // (i, j) -> packed index, -1 if dropped
    int n_states = 0;

    int pack(int i, int j) const { return index_of[i][j]; }
};

inline PartialSecularGenerator partial_secular_generator(const holstein::EigenSystem& es,
                                                         const std::vector<JumpChannel>& channels,
                                                         const MinibandPartition& bands) {
    const int d = es.size();
    bands.validate(d);

    PartialSecularGenerator gen;
    gen.n_states = d;
    gen.index_of.assign(d, std::vector<int>(d, -1));
    for (const auto& band : bands.groups)
        for (int i : band)
            for (int j : band) {
                gen.index_of[i][j] = static_cast<int>(gen.kept.size());
                gen.kept.emplace_back(i, j);
            }

    const int s = static_cast<int>(gen.kept.size());
    gen.op = Eigen::MatrixXcd::Zero(s, s);
    const std::complex<double> im(0.0, 1.0);
    for (int idx = 0; idx < s; ++idx) {
        auto [i, j] = gen.kept[idx];
        gen.op(idx, idx) += -im * (es.energies(i) - es.energies(j));
    }

    for (const auto& ch : channels) {
        for (const auto& l : ch.ops) {
            Eigen::MatrixXd le = es.vectors.transpose() * (l * es.vectors);
            Eigen::MatrixXd a = le.transpose() * le;  // (L^+L) in the eigenbasis
            for (int t = 0; t < s; ++t) {
                auto [i, j] = gen.kept[t];
                // gain: L rho L^+
                for (int u = 0; u < s; ++u) {
                    auto [k, m] = gen.kept[u];
                    double amp = le(i, k) * le(j, m);
                    if (amp != 0) gen.op(t, u) += amp;
                }
                // decay: -1/2 {L^+L, rho}
                for (int k : bands.groups[bands.band_of[i]]) {
                    int u = gen.pack(k, j);
                    if (u >= 0) gen.op(t, u) -= 0.5 * a(i, k);
                }
                for (int k : bands.groups[bands.band_of[j]]) {
                    int u = gen.pack(i, k);
                    if (u >= 0) gen.op(t, u) -= 0.5 * a(k, j);
                }
            }
        }
    }
    return gen;
}

// Kernel of the packed generator, returned as a Hermitian normalized density
// matrix in the energy eigenbasis (entries outside the kept pairs are zero).
inline Eigen::MatrixXcd ness_partial(const PartialSecularGenerator& gen) {
    const int s = static_cast<int>(gen.kept.size());
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(gen.op, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = std::max(sv(0), 1e-300);
    int dim = 0;
    for (int i = 0; i < s; ++i)
        if (sv(i) <= 1e-8 * smax) ++dim;
    if (dim != 1)
        throw NonUniqueSteadyState(dim, "partial-secular kernel dimension " +
                                            std::to_string(dim) + " (expected 1)");
    Eigen::VectorXcd x = svd.matrixV().col(s - 1);

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(gen.n_states, gen.n_states);
    for (int t = 0; t < s; ++t) rho(gen.kept[t].first, gen.kept[t].second) = x(t);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    // Rotate the arbitrary kernel phase onto the populations.
    std::complex<double> tr = rho.trace();
    if (std::abs(tr) < 1e-300) throw NumericalError("ness_partial: traceless kernel");
    rho /= tr;
    for (int i = 0; i < gen.n_states; ++i) {
        double p = rho(i, i).real();
        if (p < -1e-10) throw NumericalError("ness_partial: negative population");
        rho(i, i) = std::max(p, 0.0);
    }
    rho /= rho.trace().real();
    return rho;
}

// ---------------------------------------------------------------------------
// Time propagation (oracle for the steady-state solvers)
// ---------------------------------------------------------------------------

inline Eigen::VectorXd propagate(const RateMatrix& rm, Eigen::VectorXd p0, double t_final,
                                 double tol) {
    if (tol <= 0) throw std::invalid_argument("propagate: tol must be > 0");
    double trace0 = p0.sum();
    num::OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-4;
    Eigen::VectorXd p = num::integrate_rk45(
        [&rm](const Eigen::VectorXd& y) -> Eigen::VectorXd { return rm.w * y; }, std::move(p0),
        0.0, t_final, opt);
    if (std::abs(p.sum() - trace0) > 10 * tol)
        throw NumericalError("propagate: trace drift " + std::to_string(p.sum() - trace0));
    return p;
}

inline std::vector<Eigen::VectorXd> propagate_sampled(const RateMatrix& rm, Eigen::VectorXd p0,
                                                      const std::vector<double>& times,
                                                      double tol) {
    if (tol <= 0) throw std::invalid_argument("propagate_sampled: tol must be > 0");
    num::OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-4;
    return num::integrate_rk45_sampled(
        [&rm](const Eigen::VectorXd& y) -> Eigen::VectorXd { return rm.w * y; }, std::move(p0),
        0.0, times, opt);
}

inline Eigen::MatrixXcd propagate(const SpMatC& liou, const Eigen::MatrixXcd& rho0,
                                  double t_final, double tol) {
    if (tol <= 0) throw std::invalid_argument("propagate: tol must be > 0");
    const int d = static_cast<int>(rho0.rows());
    Eigen::VectorXcd y0(d * d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) y0(c * d + r) = rho0(r, c);
    double trace0 = rho0.trace().real();
    num::OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-4;
    Eigen::VectorXcd y = num::integrate_rk45(
        [&liou](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return liou * v; },
        std::move(y0), 0.0, t_final, opt);
    Eigen::MatrixXcd rho(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) rho(r, c) = y(c * d + r);
    if (std::abs(rho.trace().real() - trace0) > 10 * tol)
        throw NumericalError("propagate: trace drift");
    return rho;
}

// Packed-state propagation for the partial-secular generator.
inline Eigen::VectorXcd propagate_packed(const Eigen::MatrixXcd& gen, Eigen::VectorXcd y0,
                                         double t_final, double tol) {
    if (tol <= 0) throw std::invalid_argument("propagate_packed: tol must be > 0");
    num::OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-4;
    return num::integrate_rk45(
        [&gen](const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return gen * y; }, std::move(y0),
        0.0, t_final, opt);
}

// ---------------------------------------------------------------------------
// Secular validity
// ---------------------------------------------------------------------------

struct SecularValidityReport {
    enum class Regime { full_secular, partial_secular, invalid };
    double r = 0;                // max(r_p, r_b, r_r)
    double omega_interband = 0;  // smallest gap between adjacent bands
    double omega_intraband = 0;  // smallest gap inside any band (inf if none)
    double ratio_intra = 0;      // r / omega_intraband
    double ratio_inter = 0;      // r / omega_interband
    Regime regime = Regime::full_secular;
};

inline SecularValidityReport secular_validity(const holstein::EigenSystem& es,
                                              const BathRates& rates,
                                              const MinibandPartition& bands) {
    if (es.size() < 2) throw std::invalid_argument("secular_validity: need >= 2 eigenstates");
    bands.validate(es.size());
    const double inf = std::numeric_limits<double>::infinity();

    SecularValidityReport rep;
    rep.r = rates.max_rate();
    rep.omega_interband = inf;
    rep.omega_intraband = inf;
    for (std::size_t b = 0; b + 1 < bands.groups.size(); ++b) {
        double gap = es.energies(bands.groups[b + 1].front()) - es.energies(bands.groups[b].back());
        rep.omega_interband = std::min(rep.omega_interband, gap);
    }
    for (const auto& band : bands.groups)
        for (std::size_t i = 0; i + 1 < band.size(); ++i) {
            double gap = es.energies(band[i + 1]) - es.energies(band[i]);
            rep.omega_intraband = std::min(rep.omega_intraband, gap);
        }
    rep.ratio_intra = rep.r / rep.omega_intraband;
    rep.ratio_inter = rep.r / rep.omega_interband;

    constexpr double kMuchSmaller = 0.1;
    if (rep.r == 0 || rep.ratio_intra <= kMuchSmaller)
        rep.regime = SecularValidityReport::Regime::full_secular;
    else if (rep.ratio_inter <= kMuchSmaller)
        rep.regime = SecularValidityReport::Regime::partial_secular;
    else
        rep.regime = SecularValidityReport::Regime::invalid;
    return rep;
}

// ---------------------------------------------------------------------------
// NESS observables
// ---------------------------------------------------------------------------

struct NessSolution {
    Eigen::VectorXd eigen_populations;  // empty on the density-matrix path
    Eigen::VectorXd site_populations;   // P_n, n = 1..N
    double ground_population = 0;       // P_g
    double p_ex = 0;                    // sum_n P_n
    Eigen::VectorXd rho;                // P_n / P_ex; empty when undefined
    bool rho_defined = false;
    double msd = 0;                     // sum_n (N - n)^2 P_n
};

namespace detail {

inline NessSolution finish_observables(Eigen::VectorXd site_pops, double ground_pop,
                                       Eigen::VectorXd eigen_pops) {
    const int n = static_cast<int>(site_pops.size());
    for (int i = 0; i < n; ++i) {
        if (site_pops(i) < -1e-10)
            throw NumericalError("ness_observables: negative site population");
        site_pops(i) = std::max(site_pops(i), 0.0);
    }
    if (ground_pop < -1e-10) throw NumericalError("ness_observables: negative P_g");
    ground_pop = std::max(ground_pop, 0.0);

    NessSolution sol;
    sol.eigen_populations = std::move(eigen_pops);
    sol.site_populations = std::move(site_pops);
    sol.ground_population = ground_pop;
    sol.p_ex = sol.site_populations.sum();
    if (std::abs(sol.ground_population + sol.p_ex - 1.0) > 1e-8)
        throw NumericalError("ness_observables: populations do not sum to 1");
    if (sol.p_ex > 1e-12) {
        sol.rho = sol.site_populations / sol.p_ex;
        sol.rho_defined = true;
    }
    for (int i = 0; i < n; ++i) {
        double dist = double(n - (i + 1));
        sol.msd += dist * dist * sol.site_populations(i);
    }
    return sol;
}

}  // namespace detail

// Observables from secular eigenstate populations.
inline NessSolution ness_observables(const Eigen::VectorXd& eigen_pops,
                                     const holstein::EigenSystem& es) {
    if (eigen_pops.size() != es.size())
        throw std::invalid_argument("ness_observables: population/eigensystem size mismatch");
    Eigen::MatrixXd w = holstein::site_weight_matrix(es);
    Eigen::VectorXd site_pops = w.transpose() * eigen_pops;
    double ground = 0;
    for (int k = 0; k < es.size(); ++k)
        ground += eigen_pops(k) * es.vectors(0, k) * es.vectors(0, k);
    return detail::finish_observables(std::move(site_pops), ground, eigen_pops);
}

// Observables from a density matrix in the Fock basis (exact partial trace
// over the boson occupations).
inline NessSolution ness_observables(const Eigen::MatrixXcd& rho_fock, const fock::Basis& basis) {
    if (rho_fock.rows() != basis.size())
        throw std::invalid_argument("ness_observables: density matrix/basis size mismatch");
    Eigen::VectorXd site_pops = Eigen::VectorXd::Zero(basis.n_sites());
    double ground = 0;
    for (int i = 0; i < basis.size(); ++i) {
        int site = basis.state(i).exciton;
        double p = rho_fock(i, i).real();
        if (site == 0)
            ground += p;
        else
            site_pops(site - 1) += p;
    }
    return detail::finish_observables(std::move(site_pops), ground, Eigen::VectorXd());
}

// ---------------------------------------------------------------------------
// Coherence audit
// ---------------------------------------------------------------------------

// Splits NESS eigenbasis coherences into intersite (between eigenstates
// localized on different sites) and intrasite classes.  site_profiles rows are
// per-eigenstate site weights (see holstein::site_weight_matrix).
struct CoherenceAudit {
    double max_population = 0;
    double max_intersite = 0;
    double max_intrasite = 0;
    std::vector<int> dominant_site;  // 0 = ground, 1..N = site
};

inline CoherenceAudit coherence_audit(const Eigen::MatrixXcd& rho_fock,
                                      const holstein::EigenSystem& es,
                                      const Eigen::MatrixXd& site_profiles) {
    const int d = es.size();
    if (site_profiles.rows() != d)
        throw std::invalid_argument("coherence_audit: profile/eigensystem mismatch");
    Eigen::MatrixXcd rho_e = es.vectors.transpose() * rho_fock * es.vectors;

    CoherenceAudit audit;
    audit.dominant_site.resize(d);
    for (int k = 0; k < d; ++k) {
        Eigen::Index best;
        double w = site_profiles.row(k).maxCoeff(&best);
        audit.dominant_site[k] = (w < 0.5 * site_profiles.row(k).sum() + 1e-12 &&
                                  site_profiles.row(k).sum() < 1e-8)
                                     ? 0
                                     : static_cast<int>(best) + 1;
        if (site_profiles.row(k).sum() < 1e-8) audit.dominant_site[k] = 0;
    }
    for (int i = 0; i < d; ++i) {
        audit.max_population = std::max(audit.max_population, std::abs(rho_e(i, i).real()));
        for (int j = i + 1; j < d; ++j) {
            double c = std::abs(rho_e(i, j));
            if (audit.dominant_site[i] != audit.dominant_site[j])
                audit.max_intersite = std::max(audit.max_intersite, c);
            else
                audit.max_intrasite = std::max(audit.max_intrasite, c);
        }
    }
    return audit;
}

}  // namespace hns::lindblad
