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

#include <cmath>

#include "hns/holstein.hpp"

using namespace hns;
using holstein::ChainParams;

namespace {

std::vector<double> linspace(double a, double b, double step) {
    std::vector<double> v;
    for (double x = a; x <= b + 1e-12; x += step) v.push_back(x);
    return v;
}

double distance_to_rational(double x, int max_den) {
    double best = std::abs(x);  // j = 0
    for (int m = 1; m <= max_den; ++m) {
        double r = std::round(x * m) / m;
        best = std::min(best, std::abs(x - r));
    }
    return best;
}

bool any_report_near(const std::vector<holstein::CrossingReport>& reports, double delta,
                     double tol) {
    for (const auto& r : reports)
        if (std::abs(r.delta_star - delta) <= tol) return true;
    return false;
}

double min_gap_near(const std::vector<holstein::CrossingReport>& reports, double delta,
                    double tol) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& r : reports)
        if (std::abs(r.delta_star - delta) <= tol) gap = std::min(gap, r.gap);
    return gap;
}

}  // namespace

TEST_CASE("unperturbed levels cross with zero gap at exact degeneracies") {
    auto basis = fock::make_basis(3, {1, 1});
    ChainParams p{3, 0.4, 0.0, 0.0, 0.0};
    auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.3, 0.7, 0.005), 6);
    auto reports = holstein::detect_avoided_crossings(sweep);
    REQUIRE(any_report_near(reports, 0.5, 1e-9));
    CHECK(min_gap_near(reports, 0.5, 1e-9) == 0.0);
    for (const auto& r : reports)
        if (std::abs(r.delta_star - 0.5) < 1e-9) CHECK(r.jump_length == 2);
}

TEST_CASE("unperturbed levels trace lines of integer slope") {
    auto basis = fock::make_basis(3, {1, 1});
    ChainParams p{3, 0.4, 0.0, 0.0, 0.0};
    auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.31, 0.69, 0.005), 6);
    auto tracked = holstein::track_levels(sweep);
    auto slopes = holstein::tracked_slopes(sweep, tracked);
    int checked = 0;
    for (std::size_t i = 1; i + 1 < sweep.deltas.size(); ++i) {
        if (distance_to_rational(sweep.deltas[i], 2) < 0.011) continue;
        for (int l = 0; l < 6; ++l) {
            if (tracked.match_quality(i, l) < 1.0 - 1e-9 ||
                tracked.match_quality(i + 1, l) < 1.0 - 1e-9)
                continue;
            double k = std::round(slopes(i, l));
            CHECK(std::abs(slopes(i, l) - k) < 1e-9);
            CHECK(k >= 1);
            CHECK(k <= 3);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("trimer crossings sit at halves and integers; half-integer gaps are narrower") {
    auto basis = fock::make_basis(3, {10, 3});
    ChainParams p{3, 0.4, 0.4, 0.01, 0.0};
    auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.3, 1.7, 0.005), 26);
    auto reports = holstein::detect_avoided_crossings(sweep);

    REQUIRE(any_report_near(reports, 0.5, 0.0051));
    REQUIRE(any_report_near(reports, 1.0, 0.0051));
    REQUIRE(any_report_near(reports, 1.5, 0.0051));
    CHECK(min_gap_near(reports, 0.5, 0.0051) < min_gap_near(reports, 1.0, 0.0051));

    for (const auto& r : reports) {
        if (std::abs(r.delta_star - 0.5) <= 0.0051) CHECK(r.jump_length == 2);
        if (std::abs(r.delta_star - 1.0) <= 0.0051) CHECK(r.jump_length == 1);
    }
}

TEST_CASE("crossing locations are independent of lambda and J") {
    auto basis = fock::make_basis(3, {10, 3});
    for (double lambda : {0.1, 0.5}) {
        for (double j : {0.005, 0.02}) {
            ChainParams p{3, 0.4, lambda, j, 0.0};
            auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.3, 1.7, 0.005), 26);
            holstein::CrossingOptions opt;
            opt.ceiling_factor = 50;  // wide net; locations are what is under test
            auto reports = holstein::detect_avoided_crossings(sweep, opt);
            INFO("lambda = " << lambda << ", J = " << j);
            CHECK(any_report_near(reports, 0.5, 0.0051));
            CHECK(any_report_near(reports, 1.0, 0.0051));
            CHECK(any_report_near(reports, 1.5, 0.0051));
        }
    }
}

TEST_CASE("half-integer gap scales as J^2") {
    auto basis = fock::make_basis(3, {10, 3});
    std::vector<double> js{0.005, 0.01, 0.02};
    std::vector<double> gaps;
    for (double j : js) {
        ChainParams p{3, 0.5, 0.4, j, 0.0};
        auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.4985, 0.5015, 4e-6), 6, false);
        double min_gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < sweep.energies.rows(); ++i)
            for (Eigen::Index k = 0; k + 1 < sweep.energies.cols(); ++k)
                min_gap = std::min(min_gap, sweep.energies(i, k + 1) - sweep.energies(i, k));
        gaps.push_back(min_gap);
    }
    double slope_lo = std::log(gaps[1] / gaps[0]) / std::log(js[1] / js[0]);
    double slope_hi = std::log(gaps[2] / gaps[1]) / std::log(js[2] / js[1]);
    CHECK(std::abs(slope_lo - 2.0) < 0.2);
    CHECK(std::abs(slope_hi - 2.0) < 0.2);
}

TEST_CASE("tracked prong slopes are near integers away from crossings") {
    auto basis = fock::make_basis(3, {10, 3});
    ChainParams p{3, 0.4, 0.4, 0.01, 0.0};
    auto sweep = holstein::spectrum_sweep(p, basis, linspace(0.3, 1.95, 0.005), 9);
    auto tracked = holstein::track_levels(sweep);
    auto slopes = holstein::tracked_slopes(sweep, tracked);

    int checked = 0;
    for (std::size_t i = 1; i + 1 < sweep.deltas.size(); ++i) {
        if (distance_to_rational(sweep.deltas[i], 2) < 0.1) continue;
        for (int l = 0; l < 9; ++l) {
            if (tracked.match_quality(i, l) < 0.9999 ||
                tracked.match_quality(i + 1, l) < 0.9999)
                continue;
            double k = std::round(slopes(i, l));
            INFO("delta = " << sweep.deltas[i] << ", level " << l << ", slope " << slopes(i, l));
            CHECK(std::abs(slopes(i, l) - k) < 0.05);
            CHECK(k >= 1);
            CHECK(k <= 3);
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("spectrum_sweep validates its grid") {
    auto basis = fock::make_basis(2, {1, 1});
    ChainParams p{2, 0.4, 0.1, 0.01, 0.0};
    CHECK_THROWS_AS(holstein::spectrum_sweep(p, basis, {}, 3), std::invalid_argument);
    CHECK_THROWS_AS(holstein::spectrum_sweep(p, basis, {0.0, 0.5}, 3), std::invalid_argument);
    CHECK_THROWS_AS(holstein::spectrum_sweep(p, basis, {0.5, 0.4}, 3), std::invalid_argument);
    CHECK_THROWS_AS(holstein::spectrum_sweep(p, basis, {0.4, 0.5}, 99), std::invalid_argument);
}
