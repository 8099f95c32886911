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

#include <catch2/catch_amalgamated.hpp>

#include "hns/fockspace.hpp"

using namespace hns;
using fock::BasisState;
using fock::BosonTruncation;

namespace {

// Counting oracle, independent of the enumeration code: walk all vectors in
// {0..per_mode_max}^N and count the admissible ones.
long long count_admissible(int n_sites, const BosonTruncation& t) {
    long long count = 0;
    std::vector<int> occ(n_sites, 0);
    for (;;) {
        long long total = 0;
        for (int m : occ) total += m;
        if (!t.total_max || total <= *t.total_max) ++count;
        int pos = n_sites - 1;
        while (pos >= 0 && occ[pos] == t.per_mode_max) occ[pos--] = 0;
        if (pos < 0) break;
        ++occ[pos];
    }
    return count;
}

}  // namespace

TEST_CASE("basis sizes match the counting oracle") {
    CHECK(fock::enumerate_basis(1, {0, {}}).size() == 2);  // {g, |1;0>}
    CHECK(fock::enumerate_basis(2, {1, {}}).size() == 9);  // 1 + 2*4

    for (auto [n, pm, total] : {std::tuple<int, int, std::optional<int>>{3, 10, {}},
                                {3, 10, 4},
                                {4, 2, 3},
                                {2, 5, std::optional<int>{}}}) {
        BosonTruncation t{pm, total};
        auto basis = fock::enumerate_basis(n, t);
        CHECK(basis.size() == 1 + n * count_admissible(n, t));
    }
    // trimer at the tenth-level cap: 1 + 3 * 11^3
    CHECK(fock::enumerate_basis(3, {10, {}}).size() == 3994);
}

TEST_CASE("ordering is deterministic with the ground state first") {
    auto basis = fock::enumerate_basis(2, {1, {}});
    REQUIRE(basis.size() == 9);
    CHECK(basis.state(0) == BasisState{0, {0, 0}});
    CHECK(basis.state(1) == BasisState{1, {0, 0}});
    CHECK(basis.state(2) == BasisState{1, {0, 1}});
    CHECK(basis.state(3) == BasisState{1, {1, 0}});
    CHECK(basis.state(4) == BasisState{1, {1, 1}});
    CHECK(basis.state(5) == BasisState{2, {0, 0}});
    CHECK(basis.state(8) == BasisState{2, {1, 1}});
}

TEST_CASE("index round-trips for every state") {
    auto basis = fock::enumerate_basis(3, {3, 4});
    for (int i = 0; i < basis.size(); ++i) CHECK(basis.index_of(basis.state(i)) == i);
    CHECK(basis.index_of(BasisState{1, {9, 9, 9}}) == -1);
}

TEST_CASE("enumerate_basis rejects bad inputs") {
    CHECK_THROWS_AS(fock::enumerate_basis(0, {1, {}}), std::invalid_argument);
    CHECK_THROWS_AS(fock::enumerate_basis(2, {-1, {}}), std::invalid_argument);
    CHECK_THROWS_AS(fock::enumerate_basis(2, {1, 3}), std::invalid_argument);  // total > N*per
}

TEST_CASE("boson ladder algebra on a single mode") {
    auto basis = fock::enumerate_basis(1, {4, {}});
    auto a = Eigen::MatrixXd(fock::boson_annihilator(basis, 1));

    auto ket = [&](int m) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
        v(basis.index_of(BasisState{1, {m}})) = 1.0;
        return v;
    };
    CHECK((a * ket(1) - ket(0)).norm() == Catch::Approx(0.0).margin(1e-15));
    CHECK((a * ket(3) - std::sqrt(3.0) * ket(2)).norm() == Catch::Approx(0.0).margin(1e-15));

    // number operator from the ladder pair
    Eigen::MatrixXd n_op = a.transpose() * a;
    for (int m = 0; m <= 4; ++m)
        CHECK(n_op(basis.index_of(BasisState{1, {m}}), basis.index_of(BasisState{1, {m}})) ==
              Catch::Approx(double(m)));
    CHECK((n_op - Eigen::MatrixXd(n_op.diagonal().asDiagonal())).norm() ==
          Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("commutator [a, a^T] is the identity away from the truncation shell") {
    auto basis = fock::enumerate_basis(2, {3, {}});
    for (int mode = 1; mode <= 2; ++mode) {
        Eigen::MatrixXd a = Eigen::MatrixXd(fock::boson_annihilator(basis, mode));
        Eigen::MatrixXd comm = a * a.transpose() - a.transpose() * a;
        for (int i = 0; i < basis.size(); ++i) {
            const auto& s = basis.state(i);
            if (s.exciton == 0) continue;
            if (s.occupations[mode - 1] < basis.truncation().per_mode_max)
                CHECK(comm(i, i) == Catch::Approx(1.0));
        }
    }
    CHECK_THROWS_AS(fock::boson_annihilator(basis, 3), std::out_of_range);
}

TEST_CASE("exciton operators") {
    auto basis = fock::enumerate_basis(2, {1, {}});
    auto c1 = Eigen::MatrixXd(fock::exciton_annihilator(basis, 1));

    Eigen::VectorXd site1_zero = Eigen::VectorXd::Zero(basis.size());
    site1_zero(basis.index_of(BasisState{1, {0, 0}})) = 1.0;
    Eigen::VectorXd ground = Eigen::VectorXd::Zero(basis.size());
    ground(0) = 1.0;
    CHECK((c1 * site1_zero - ground).norm() == Catch::Approx(0.0).margin(1e-15));

    Eigen::VectorXd site2_zero = Eigen::VectorXd::Zero(basis.size());
    site2_zero(basis.index_of(BasisState{2, {0, 0}})) = 1.0;
    CHECK((c1 * site2_zero).norm() == Catch::Approx(0.0).margin(1e-15));

    // Summed over the recombination channel, L^T L is the exact projector
    // onto exciton-on-site states, diagonal with entries in {0, 1}.
    for (int site = 1; site <= 2; ++site) {
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(basis.size(), basis.size());
        for (const auto& l : fock::recombination_channel(basis, site)) {
            Eigen::MatrixXd ld(l);
            sum += ld.transpose() * ld;
        }
        Eigen::MatrixXd proj = Eigen::MatrixXd(fock::exciton_number(basis, site));
        CHECK((sum - proj).norm() == Catch::Approx(0.0).margin(1e-14));
        for (int i = 0; i < basis.size(); ++i) {
            double d = proj(i, i);
            CHECK((d == 0.0 || d == 1.0));
            CHECK(d == (basis.state(i).exciton == site ? 1.0 : 0.0));
        }
    }

    // The single zero-phonon element also satisfies the diagonal {0,1} rule.
    Eigen::MatrixXd ctc = c1.transpose() * c1;
    CHECK((ctc - Eigen::MatrixXd(ctc.diagonal().asDiagonal())).norm() ==
          Catch::Approx(0.0).margin(1e-15));
    for (int i = 0; i < basis.size(); ++i) CHECK((ctc(i, i) == 0.0 || ctc(i, i) == 1.0));

    CHECK_THROWS_AS(fock::exciton_annihilator(basis, 0), std::out_of_range);
    CHECK_THROWS_AS(fock::exciton_annihilator(basis, 3), std::out_of_range);
}
