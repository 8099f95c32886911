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
#include <Eigen/SparseLU>

#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hns {

// Error taxonomy shared by all modules.  CLI maps these onto exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonUniqueSteadyState : NumericalError {
    int kernel_dimension;
    explicit NonUniqueSteadyState(int dim, const std::string& what)
        : NumericalError(what), kernel_dimension(dim) {}
};

namespace num {

struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Closest j/m (reduced, m <= max_den, j >= 0) to x; ties resolved towards smaller m.
inline Rational nearest_rational(double x, int max_den) {
    Rational best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= max_den; ++m) {
        long long j = std::llround(x * m);
        if (j < 0) j = 0;
        long long g = std::gcd(j, static_cast<long long>(m));
        if (g == 0) g = 1;
        Rational cand{j / g, m / g};
        double err = std::abs(x - cand.value());
        if (err + 1e-15 < best_err) {
            best = cand;
            best_err = err;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integration of y' = f(y) for linear,
// time-invariant generators.  Vec is Eigen::VectorXd or Eigen::VectorXcd.
// ---------------------------------------------------------------------------

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    long max_steps = 20'000'000;
};

template <typename Vec, typename Deriv>
Vec integrate_rk45(Deriv&& f, Vec y, double t0, double t1, const OdeOptions& opt = {}) {
    if (!(t1 >= t0)) throw std::invalid_argument("integrate_rk45: t1 < t0");
    if (t1 == t0) return y;

    // Butcher tableau, Dormand-Prince 5(4).
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                     e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    double t = t0;
    Vec k1 = f(y);
    // Initial step from the derivative scale.
    double y_scale = y.norm() + opt.abs_tol;
    double d_scale = k1.norm();
    double h = (d_scale > 0) ? 0.01 * y_scale / d_scale : (t1 - t0) * 1e-3;
    h = std::min(h, t1 - t0);

    long steps = 0;
    bool k1_fresh = true;
    while (t < t1) {
        if (++steps > opt.max_steps)
            throw NumericalError("integrate_rk45: step budget exhausted");
        h = std::min(h, t1 - t);
        if (!(t + h > t)) throw NumericalError("integrate_rk45: step size underflow");

        if (!k1_fresh) k1 = f(y);
        Vec k2 = f((y + h * (a21 * k1)).eval());
        Vec k3 = f((y + h * (a31 * k1 + a32 * k2)).eval());
        Vec k4 = f((y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        Vec k5 = f((y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        Vec k6 = f((y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        Vec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec k7 = f(y5);
        Vec y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        // Weighted max-norm of the local error estimate.
        double err = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = std::move(y5);
            k1 = std::move(k7);  // FSAL
            k1_fresh = true;
        } else {
            k1_fresh = true;  // y unchanged, k1 still valid
        }
        double grow = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }
    return y;
}

// Integrates and records the state at each requested time (sorted ascending).
template <typename Vec, typename Deriv>
std::vector<Vec> integrate_rk45_sampled(Deriv&& f, Vec y, double t0,
                                        const std::vector<double>& times,
                                        const OdeOptions& opt = {}) {
    std::vector<Vec> out;
    out.reserve(times.size());
    double t = t0;
    for (double ts : times) {
        if (ts < t) throw std::invalid_argument("integrate_rk45_sampled: times not ascending");
        y = integrate_rk45(f, std::move(y), t, ts, opt);
        t = ts;
        out.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Kernel extraction for singular generators.
// ---------------------------------------------------------------------------

struct KernelReport {
    int dimension = 0;
    double sv_smallest = 0;
    double sv_second = 0;
    double sv_largest = 0;
};

// Null vector of a square real matrix whose kernel is expected to be
// one-dimensional.  Extraction is LU-based; the dimension check uses the
// smallest singular values (sigma < rel_tol * sigma_max counts as zero).
inline Eigen::VectorXd unique_null_vector(const Eigen::MatrixXd& a, double rel_tol = 1e-8,
                                          KernelReport* report = nullptr) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("unique_null_vector: matrix not square");

    Eigen::BDCSVD<Eigen::MatrixXd> svd_values(a);
    const auto& sv = svd_values.singularValues();
    const double smax = sv(0);
    int dim = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sv(i) <= rel_tol * std::max(smax, 1e-300)) ++dim;
    if (smax == 0.0) dim = static_cast<int>(n);
    KernelReport rep{dim, sv(n - 1), n >= 2 ? sv(n - 2) : sv(n - 1), smax};
    if (report) *report = rep;
    if (dim != 1)
        throw NonUniqueSteadyState(dim, "kernel dimension " + std::to_string(dim) +
                                            " (expected 1); sv_second/sv_max = " +
                                            std::to_string(rep.sv_second / std::max(smax, 1e-300)));

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(rel_tol);
    Eigen::MatrixXd ker = lu.kernel();
    if (lu.dimensionOfKernel() == 1) return ker.col(0);
    // LU rank threshold disagreed with the singular values; fall back to the
    // right singular vector of the smallest singular value.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().col(n - 1);
}

// ---------------------------------------------------------------------------
// Steady state of a (d^2 x d^2) vectorized Lindblad generator, column-stacking
// convention.  Solved by replacing one row with the trace functional and
// back-substituting; uniqueness is cross-checked by repeating the solve with a
// different replaced row.  Iterative refinement keeps the result accurate for
// the badly scaled generators that arise when dissipation rates are many
// orders of magnitude below the Hamiltonian norm.
// ---------------------------------------------------------------------------

using SparseC = Eigen::SparseMatrix<std::complex<double>>;

namespace detail {

inline Eigen::VectorXcd trace_replaced_solve_dense(const Eigen::MatrixXcd& liou, int d, int row) {
    Eigen::MatrixXcd a = liou;
    a.row(row).setZero();
    for (int i = 0; i < d; ++i) a(row, i * d + i) = 1.0;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(liou.rows());
    b(row) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd x = lu.solve(b);
    for (int it = 0; it < 2; ++it) {
        Eigen::VectorXcd r = b - a * x;
        x += lu.solve(r);
    }
    double rel_res = (a * x - b).norm() / std::max(x.norm(), 1e-300);
    if (!std::isfinite(rel_res) || rel_res > 1e-6)
        throw NonUniqueSteadyState(-1, "steady-state solve did not converge (residual " +
                                           std::to_string(rel_res) + ")");
    return x;
}

inline Eigen::VectorXcd trace_replaced_solve_sparse(const SparseC& liou, int d, int row) {
    SparseC a = liou;
    a.prune([row](int r, int, const std::complex<double>&) { return r != row; });
    std::vector<Eigen::Triplet<std::complex<double>>> tr;
    tr.reserve(d);
    for (int i = 0; i < d; ++i) tr.emplace_back(row, i * d + i, std::complex<double>(1.0, 0.0));
    SparseC trace_row(liou.rows(), liou.cols());
    trace_row.setFromTriplets(tr.begin(), tr.end());
    a += trace_row;
    a.makeCompressed();

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(liou.rows());
    b(row) = 1.0;
    Eigen::SparseLU<SparseC> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw NonUniqueSteadyState(-1, "sparse steady-state factorization failed");
    Eigen::VectorXcd x = lu.solve(b);
    for (int it = 0; it < 2; ++it) {
        Eigen::VectorXcd r = b - a * x;
        x += lu.solve(r);
    }
    double rel_res = (a * x - b).norm() / std::max(x.norm(), 1e-300);
    if (!std::isfinite(rel_res) || rel_res > 1e-6)
        throw NonUniqueSteadyState(-1, "sparse steady-state solve did not converge");
    return x;
}

}  // namespace detail

// dense_entry_cap bounds the number of entries of the densified generator.
inline Eigen::VectorXcd steady_state_vector(const SparseC& liou, int d,
                                            std::size_t dense_entry_cap = 4'000'000) {
    const Eigen::Index dim = liou.rows();
    if (dim != liou.cols() || dim != static_cast<Eigen::Index>(d) * d)
        throw std::invalid_argument("steady_state_vector: generator/dimension mismatch");

    const bool dense = static_cast<std::size_t>(dim) * dim <= dense_entry_cap;
    const int row_a = 0;
    const int row_b = (d - 1) * d + (d - 1);
    Eigen::VectorXcd xa, xb;
    if (dense) {
        Eigen::MatrixXcd full(liou);
        xa = detail::trace_replaced_solve_dense(full, d, row_a);
        xb = detail::trace_replaced_solve_dense(full, d, row_b);
    } else {
        xa = detail::trace_replaced_solve_sparse(liou, d, row_a);
        xb = detail::trace_replaced_solve_sparse(liou, d, row_b);
    }
    double diff = (xa - xb).cwiseAbs().maxCoeff();
    double scale = std::max(xa.cwiseAbs().maxCoeff(), 1e-300);
    if (diff / scale > 1e-7)
        throw NonUniqueSteadyState(2, "steady state not unique: trace-constrained solves with "
                                      "different pinned rows disagree by " +
                                          std::to_string(diff / scale));
    double res = (liou * xa).norm() / std::max(xa.norm(), 1e-300);
    if (!std::isfinite(res) || res > 1e-6)
        throw NumericalError("steady-state residual too large: " + std::to_string(res));
    return xa;
}

// ---------------------------------------------------------------------------
// Order-preserving parallel map over [0, n).  Each item must be independent;
// results are written by index so the outcome matches the serial loop.
// ---------------------------------------------------------------------------
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace num
}  // namespace hns
