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

#include <algorithm>

#include "hns/holstein.hpp"

using namespace hns;
using holstein::ChainParams;

TEST_CASE("uncoupled Hamiltonian has energies n*delta + n_b") {
    const double delta = 0.3;
    auto basis = fock::make_basis(2, {1, {}});
    ChainParams p{2, delta, 0.0, 0.0, 0.0};
    auto es = holstein::eigensystem(holstein::build_hamiltonian(p, *basis), basis);

    std::vector<double> expected{0.0};  // ground
    for (int n = 1; n <= 2; ++n)
        for (int nb : {0, 1, 1, 2}) expected.push_back(n * delta + nb);
    std::sort(expected.begin(), expected.end());
    REQUIRE(es.size() == static_cast<int>(expected.size()));
    for (int k = 0; k < es.size(); ++k)
        CHECK(es.energies(k) == Catch::Approx(expected[k]).margin(1e-12));
}

TEST_CASE("single-site polaron energy is delta - lambda^2") {
    const double delta = 0.7, lambda = 0.4;
    auto basis = fock::make_basis(1, {12, {}});
    ChainParams p{1, delta, lambda, 0.0, 0.0};
    auto es = holstein::one_exciton_eigensystem(p, basis);
    CHECK(es.energies(0) == Catch::Approx(delta - lambda * lambda).margin(1e-6));
}

TEST_CASE("bare dimer at zero bias splits by +-J") {
    auto basis = fock::make_basis(2, {0, {}});
    ChainParams p{2, 0.0, 0.0, 0.013, 0.0};
    auto es = holstein::one_exciton_eigensystem(p, basis);
    CHECK(es.energies(0) == Catch::Approx(-0.013));
    CHECK(es.energies(1) == Catch::Approx(+0.013));
}

TEST_CASE("ground state stays decoupled at zero energy") {
    auto basis = fock::make_basis(3, {3, 3});
    ChainParams p{3, 0.45, 0.4, 0.01, 0.2};
    Eigen::MatrixXd h(holstein::build_hamiltonian(p, *basis));
    CHECK(h(0, 0) == 0.0);
    CHECK(h.row(0).cwiseAbs().sum() == 0.0);
    CHECK(h.col(0).cwiseAbs().sum() == 0.0);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);

    auto mismatched = fock::make_basis(2, {3, 3});
    CHECK_THROWS_AS(holstein::build_hamiltonian(p, *mismatched), std::invalid_argument);
}

TEST_CASE("closure: lambda = J = 0 eigenvalues match k*delta + n_b exactly") {
    auto basis = fock::make_basis(3, {2, 3});
    ChainParams p{3, 0.45, 0.0, 0.0, 0.0};
    auto es = holstein::eigensystem(holstein::build_hamiltonian(p, *basis), basis);
    std::vector<double> expected;
    for (const auto& s : basis->states())
        expected.push_back(s.exciton == 0 ? 0.0 : s.exciton * p.delta + s.total_quanta());
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < es.size(); ++k)
        CHECK(std::abs(es.energies(k) - expected[k]) < 1e-12);
}

TEST_CASE("bessel series") {
    CHECK(holstein::bessel_first_kind(0, 0.0) == 1.0);
    CHECK(holstein::bessel_first_kind(3, 0.0) == 0.0);
    CHECK(holstein::bessel_first_kind(-2, 0.04) ==
          Catch::Approx(holstein::bessel_first_kind(2, 0.04)).epsilon(1e-14));
    CHECK(holstein::bessel_first_kind(-1, 0.04) ==
          Catch::Approx(-holstein::bessel_first_kind(1, 0.04)).epsilon(1e-14));

    // power-series oracle: J_1(z) = z/2 - z^3/16 + z^5/384
    const double z = 0.02;
    double oracle = z / 2 - std::pow(z, 3) / 16 + std::pow(z, 5) / 384;
    CHECK(holstein::bessel_first_kind(1, z) == Catch::Approx(oracle).margin(1e-12));
    CHECK(holstein::bessel_first_kind(1, 0.02) == Catch::Approx(0.0099995).margin(1e-7));

    // cross-check against std::cyl_bessel_j over the validated range
    for (double arg : {0.02, 0.3, 1.0, 2.0})
        for (int n : {0, 1, 2, 5})
            CHECK(holstein::bessel_first_kind(n, arg) ==
                  Catch::Approx(std::cyl_bessel_j(n, arg)).margin(1e-12));

    CHECK_THROWS_AS(holstein::bessel_first_kind(0, 2.5), std::domain_error);
}

TEST_CASE("Wannier-Stark coefficients") {
    SECTION("J -> 0 limit reduces to the site vector") {
        ChainParams p{5, 1.0, 0.4, 1e-8, 0.0};
        Eigen::VectorXd v = holstein::ws_coefficients(3, p);
        CHECK(v(2) == Catch::Approx(1.0).margin(1e-12));
        CHECK(v.cwiseAbs().maxCoeff() == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("finite-chain norm deficit is tiny at J/delta = 0.01 (interior site)") {
        ChainParams p{5, 1.0, 0.4, 0.01, 0.0};
        const double z = 2 * p.j_hop / p.delta;
        double sum = 0;
        for (int i = 1; i <= p.n_sites; ++i) {
            double c = holstein::bessel_first_kind(i - 3, z);
            sum += c * c;
        }
        CHECK(std::abs(1.0 - sum) < 1e-8);
    }
    SECTION("adjacent-site amplitude ratio is J/delta to 1%") {
        ChainParams p{5, 1.0, 0.4, 0.01, 0.0};
        Eigen::VectorXd v = holstein::ws_coefficients(3, p);
        CHECK(std::abs(v(3) / v(2)) == Catch::Approx(0.01).epsilon(0.01));
        CHECK(std::abs(v(1) / v(2)) == Catch::Approx(0.01).epsilon(0.01));
    }
    ChainParams zero_bias{5, 0.0, 0.4, 0.01, 0.0};
    CHECK_THROWS_AS(holstein::ws_coefficients(3, zero_bias), std::domain_error);
}

TEST_CASE("ws_coupling_scale") {
    ChainParams p{5, 0.5, 0.4, 0.01, 0.0};
    CHECK(holstein::ws_coupling_scale(2, 2, p) == Catch::Approx(0.4));
    CHECK(holstein::ws_coupling_scale(1, 2, p) == Catch::Approx(0.008));
    CHECK(holstein::ws_coupling_scale(1, 3, p) / holstein::ws_coupling_scale(1, 2, p) ==
          Catch::Approx(0.02));
    ChainParams zero_bias{5, 0.0, 0.4, 0.01, 0.0};
    CHECK_THROWS_AS(holstein::ws_coupling_scale(1, 2, zero_bias), std::domain_error);
}

TEST_CASE("eigensystem contract") {
    SECTION("diagonal matrix") {
        fock::SpMat h(3, 3);
        h.insert(0, 0) = 2.0;
        h.insert(1, 1) = -1.0;
        h.insert(2, 2) = 0.5;
        auto es = holstein::eigensystem(h, nullptr);
        CHECK(es.energies(0) == Catch::Approx(-1.0));
        CHECK(es.energies(1) == Catch::Approx(0.5));
        CHECK(es.energies(2) == Catch::Approx(2.0));
        for (int k = 0; k < 3; ++k) CHECK(es.vectors.col(k).cwiseAbs().maxCoeff() == 1.0);
    }
    SECTION("2x2 hop") {
        fock::SpMat h(2, 2);
        h.insert(0, 1) = 0.3;
        h.insert(1, 0) = 0.3;
        auto es = holstein::eigensystem(h, nullptr);
        CHECK(es.energies(0) == Catch::Approx(-0.3));
        CHECK(es.energies(1) == Catch::Approx(+0.3));
        CHECK(std::abs(es.vectors(0, 0)) == Catch::Approx(1 / std::sqrt(2.0)));
    }
    SECTION("reconstruction residual on a trimer") {
        auto basis = fock::make_basis(3, {2, 2});
        ChainParams p{3, 0.45, 0.4, 0.01, 0.0};
        fock::SpMat h = holstein::build_hamiltonian(p, *basis);
        auto es = holstein::eigensystem(h, basis);
        Eigen::MatrixXd hd(h);
        Eigen::MatrixXd rec = es.vectors * es.energies.asDiagonal() * es.vectors.transpose();
        CHECK((rec - hd).norm() < 1e-9 * hd.norm());
        CHECK((es.vectors.transpose() * es.vectors -
               Eigen::MatrixXd::Identity(es.size(), es.size()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
    SECTION("non-symmetric input rejected") {
        fock::SpMat h(2, 2);
        h.insert(0, 1) = 0.3;
        CHECK_THROWS_AS(holstein::eigensystem(h, nullptr), std::invalid_argument);
    }
}

TEST_CASE("eigenstate site populations") {
    SECTION("uncoupled eigenstates sit on single sites") {
        auto basis = fock::make_basis(3, {1, 1});
        ChainParams p{3, 0.45, 0.0, 0.0, 0.0};
        auto es = holstein::one_exciton_eigensystem(p, basis);
        Eigen::MatrixXd w = holstein::eigenstate_site_populations(es);
        for (int k = 0; k < w.rows(); ++k) {
            CHECK(w.row(k).sum() == Catch::Approx(1.0).margin(1e-10));
            CHECK(w.row(k).maxCoeff() == Catch::Approx(1.0).margin(1e-12));
        }
    }
    SECTION("eigensystem containing the ground vector is rejected") {
        auto basis = fock::make_basis(2, {1, 1});
        ChainParams p{2, 0.45, 0.1, 0.01, 0.0};
        auto es = holstein::eigensystem(holstein::build_hamiltonian(p, *basis), basis);
        CHECK_THROWS_AS(holstein::eigenstate_site_populations(es), std::invalid_argument);
    }
}

TEST_CASE("pentamer eigenstates: localization off resonance, alternating mixing on") {
    auto basis = fock::make_basis(5, {10, 3});
    const int n_check = 15;

    ChainParams off{5, 0.45, 0.4, 0.01, 0.0};
    auto es_off = holstein::one_exciton_eigensystem(off, basis);
    Eigen::MatrixXd w_off = holstein::eigenstate_site_populations(es_off);
    for (int k = 0; k < n_check; ++k) CHECK(w_off.row(k).maxCoeff() > 0.95);

    ChainParams on{5, 0.50, 0.4, 0.01, 0.0};
    auto es_on = holstein::one_exciton_eigensystem(on, basis);
    Eigen::MatrixXd w_on = holstein::eigenstate_site_populations(es_on);
    // states 3-8 (1-based) delocalize only across alternating sites
    for (int k = 2; k < 8; ++k) {
        double odd = w_on(k, 0) + w_on(k, 2) + w_on(k, 4);
        double even = w_on(k, 1) + w_on(k, 3);
        CHECK(odd * even < 1e-2);
    }
}

TEST_CASE("ipr") {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(4);
    unit(2) = 1.0;
    CHECK(holstein::ipr(unit) == Catch::Approx(1.0));
    CHECK(holstein::ipr(Eigen::VectorXd::Constant(4, 0.25)) == Catch::Approx(4.0));
    Eigen::VectorXd half = Eigen::VectorXd::Zero(4);
    half(0) = half(1) = 0.5;
    CHECK(holstein::ipr(half) == Catch::Approx(2.0));

    Eigen::VectorXd negative(2);
    negative << 1.5, -0.5;
    CHECK_THROWS_AS(holstein::ipr(negative), std::invalid_argument);
    CHECK_THROWS_AS(holstein::ipr(Eigen::VectorXd::Constant(4, 0.3)), std::invalid_argument);
}
