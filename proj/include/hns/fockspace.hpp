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
#include <compare>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "hns/numerics.hpp"

namespace hns::fock {

using SpMat = Eigen::SparseMatrix<double>;

// Truncation policy for the local bosonic modes: a hard per-mode cap plus an
// optional cap on the total number of quanta.
struct BosonTruncation {
    int per_mode_max = 10;
    std::optional<int> total_max{};

    void validate(int n_sites) const {
        if (per_mode_max < 0)
            throw std::invalid_argument("BosonTruncation: per_mode_max must be >= 0");
        if (total_max) {
            if (*total_max < 0)
                throw std::invalid_argument("BosonTruncation: total_max must be >= 0");
            if (*total_max > static_cast<long long>(n_sites) * per_mode_max)
                throw std::invalid_argument(
                    "BosonTruncation: total_max exceeds n_sites * per_mode_max");
        }
    }

    bool admits(const std::vector<int>& occ) const {
        int total = 0;
        for (int m : occ) {
            if (m < 0 || m > per_mode_max) return false;
            total += m;
        }
        return !total_max || total <= *total_max;
    }
};

// One product state |exciton; m_1 ... m_N>.  exciton == 0 denotes the
// electronic ground state; 1..N the site carrying the exciton.
struct BasisState {
    int exciton = 0;
    std::vector<int> occupations;

    friend auto operator<=>(const BasisState&, const BasisState&) = default;

    int total_quanta() const {
        int s = 0;
        for (int m : occupations) s += m;
        return s;
    }
};

// Enumerated zero/one-exciton space with a deterministic lexicographic order:
// the ground state first (it carries the all-zero occupation only), then site
// 1..N each with its occupation vectors in ascending lexicographic order.
class Basis {
  public:
    Basis(int n_sites, BosonTruncation trunc, std::vector<BasisState> states)
        : n_sites_(n_sites), trunc_(trunc), states_(std::move(states)) {}

    int n_sites() const { return n_sites_; }
    int size() const { return static_cast<int>(states_.size()); }
    const BosonTruncation& truncation() const { return trunc_; }
    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& state(int i) const { return states_[i]; }

    // -1 when the state lies outside the basis.
    int index_of(const BasisState& s) const {
        auto it = std::lower_bound(states_.begin(), states_.end(), s);
        if (it == states_.end() || *it != s) return -1;
        return static_cast<int>(it - states_.begin());
    }

    // Index of states_[i] with one quantum removed from / added to `mode`
    // (0-based); -1 when the result falls outside the basis.
    int lowered_index(int i, int mode) const {
        const BasisState& s = states_[i];
        if (s.exciton == 0 || s.occupations[mode] == 0) return -1;
        BasisState t = s;
        --t.occupations[mode];
        return index_of(t);
    }
    int raised_index(int i, int mode) const {
        const BasisState& s = states_[i];
        if (s.exciton == 0) return -1;
        BasisState t = s;
        ++t.occupations[mode];
        if (!trunc_.admits(t.occupations)) return -1;
        return index_of(t);
    }

  private:
    int n_sites_;
    BosonTruncation trunc_;
    std::vector<BasisState> states_;
};

namespace detail {

// All admissible occupation vectors in ascending lexicographic order.
inline std::vector<std::vector<int>> occupation_vectors(int n_sites,
                                                        const BosonTruncation& trunc) {
    std::vector<std::vector<int>> out;
    std::vector<int> occ(n_sites, 0);
    for (;;) {
        out.push_back(occ);
        int pos = n_sites - 1;
        while (pos >= 0) {
            ++occ[pos];
            if (trunc.admits(occ)) break;
            occ[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

}  // namespace detail

inline Basis enumerate_basis(int n_sites, const BosonTruncation& trunc) {
    if (n_sites < 1) throw std::invalid_argument("enumerate_basis: n_sites must be >= 1");
    trunc.validate(n_sites);

    auto occs = detail::occupation_vectors(n_sites, trunc);
    if (occs.empty())
        throw std::invalid_argument("enumerate_basis: truncation admits no occupation vectors");

    std::vector<BasisState> states;
    states.reserve(1 + static_cast<std::size_t>(n_sites) * occs.size());
    states.push_back(BasisState{0, std::vector<int>(n_sites, 0)});
    for (int site = 1; site <= n_sites; ++site)
        for (const auto& occ : occs) states.push_back(BasisState{site, occ});
    return Basis(n_sites, trunc, std::move(states));
}

inline std::shared_ptr<const Basis> make_basis(int n_sites, const BosonTruncation& trunc) {
    return std::make_shared<const Basis>(enumerate_basis(n_sites, trunc));
}

// <s'|a_mode|s> = sqrt(m_mode) where s' is s with one quantum removed from
// `mode` (1-based).  Rows and columns touching truncated states are zero.
inline SpMat boson_annihilator(const Basis& basis, int mode) {
    if (mode < 1 || mode > basis.n_sites())
        throw std::out_of_range("boson_annihilator: mode out of range");
    const int d = basis.size();
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < d; ++i) {
        int j = basis.lowered_index(i, mode - 1);
        if (j >= 0) trips.emplace_back(j, i, std::sqrt(double(basis.state(i).occupations[mode - 1])));
    }
    SpMat a(d, d);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

// Zero-phonon recombination element |Ground><site; 0...0|.  Its transpose is
// the pump operator: re-excitation happens from the relaxed (empty) modes.
inline SpMat exciton_annihilator(const Basis& basis, int site) {
    if (site < 1 || site > basis.n_sites())
        throw std::out_of_range("exciton_annihilator: site out of range");
    const int d = basis.size();
    BasisState zero{site, std::vector<int>(basis.n_sites(), 0)};
    int col = basis.index_of(zero);
    SpMat c(d, d);
    if (col >= 0) c.insert(0, col) = 1.0;
    c.makeCompressed();
    return c;
}

// Recombination acts as a channel: one jump element |Ground><site; m> per
// occupation configuration.  This is the exciton annihilator of the untruncated
// model with the ground-sector bosons traced out; summed L^T L reproduces the
// exact site projector, so every one-exciton state decays at the full rate no
// matter how the phonons are excited.
inline std::vector<SpMat> recombination_channel(const Basis& basis, int site) {
    if (site < 1 || site > basis.n_sites())
        throw std::out_of_range("recombination_channel: site out of range");
    const int d = basis.size();
    std::vector<SpMat> ops;
    for (int i = 0; i < d; ++i) {
        if (basis.state(i).exciton != site) continue;
        SpMat l(d, d);
        l.insert(0, i) = 1.0;
        l.makeCompressed();
        ops.push_back(std::move(l));
    }
    return ops;
}

// Projector onto exciton-on-`site` states (the exciton number operator).
inline SpMat exciton_number(const Basis& basis, int site) {
    if (site < 1 || site > basis.n_sites())
        throw std::out_of_range("exciton_number: site out of range");
    const int d = basis.size();
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < d; ++i)
        if (basis.state(i).exciton == site) trips.emplace_back(i, i, 1.0);
    SpMat p(d, d);
    p.setFromTriplets(trips.begin(), trips.end());
    return p;
}

}  // namespace hns::fock
