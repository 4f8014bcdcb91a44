#pragma once

// Reference solvers used only by the tests. They share no code with the
// library's simplex or branch-and-bound.

#include "srr/core.hpp"
#include "srr/simplex.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using srr::Index;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn)
{
    if (k > n || k < 0) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

/// Minimum of c^T x over {A x (senses) b, x >= 0} by trying every basis of
/// n active constraints. Empty optional when no vertex is feasible. Only
/// meaningful for LPs known to be bounded below.
inline std::optional<double> vertex_min(const srr::lp::Problem<double>& p, double tol = 1e-9)
{
    const Index m = p.constraint_matrix.rows();
    const Index n = p.constraint_matrix.cols();
    // Candidate active constraints: every row, then x_j = 0.
    Mat g(m + n, n);
    Vec h(m + n);
    g.topRows(m) = p.constraint_matrix;
    h.head(m) = p.rhs;
    g.bottomRows(n) = Mat::Identity(n, n);
    h.tail(n).setZero();

    std::optional<double> best;
    for_each_combination(static_cast<int>(m + n), static_cast<int>(n), [&](const std::vector<int>& rows) {
        Mat a(n, n);
        Vec b(n);
        for (Index r = 0; r < n; ++r) {
            a.row(r) = g.row(rows[static_cast<std::size_t>(r)]);
            b(r) = h(rows[static_cast<std::size_t>(r)]);
        }
        Eigen::FullPivLU<Mat> lu(a);
        if (lu.rank() < n) return;
        const Vec x = lu.solve(b);
        if (!x.allFinite()) return;
        if ((x.array() < -tol).any()) return;
        const Vec ax = p.constraint_matrix * x;
        for (Index i = 0; i < m; ++i) {
            const double scale = 1.0 + std::abs(p.rhs(i));
            switch (p.row_senses[static_cast<std::size_t>(i)]) {
            case srr::lp::RowSense::LessEqual:
                if (ax(i) > p.rhs(i) + tol * scale) return;
                break;
            case srr::lp::RowSense::GreaterEqual:
                if (ax(i) < p.rhs(i) - tol * scale) return;
                break;
            case srr::lp::RowSense::Equal:
                if (std::abs(ax(i) - p.rhs(i)) > tol * scale) return;
                break;
            }
        }
        const double obj = p.costs.dot(x);
        if (!best || obj < *best) best = obj;
    });
    if (n == 0) {
        // No variables: feasible iff every row holds at zero.
        for (Index i = 0; i < m; ++i) {
            const double v = p.rhs(i);
            const auto s = p.row_senses[static_cast<std::size_t>(i)];
            if ((s == srr::lp::RowSense::LessEqual && v < -tol) || (s == srr::lp::RowSense::GreaterEqual && v > tol) ||
                (s == srr::lp::RowSense::Equal && std::abs(v) > tol))
                return std::nullopt;
        }
        return 0.0;
    }
    return best;
}

/// min sum |w_j| subject to |y_i - w^T x_i| <= delta on the given rows,
/// written out in split form and solved by vertex enumeration.
inline std::optional<double> tube_min(const Mat& x, const Vec& y, const std::vector<Index>& rows, double delta)
{
    const Index n = x.cols();
    srr::lp::Problem<double> p;
    p.costs = Vec::Ones(2 * n);
    const auto k = static_cast<Index>(rows.size());
    p.constraint_matrix.resize(2 * k, 2 * n);
    p.rhs.resize(2 * k);
    for (Index r = 0; r < k; ++r) {
        const Index i = rows[static_cast<std::size_t>(r)];
        p.constraint_matrix.row(2 * r) << x.row(i), -x.row(i);
        p.constraint_matrix.row(2 * r + 1) << x.row(i), -x.row(i);
        p.rhs(2 * r) = y(i) + delta;
        p.rhs(2 * r + 1) = y(i) - delta;
        p.row_senses.push_back(srr::lp::RowSense::LessEqual);
        p.row_senses.push_back(srr::lp::RowSense::GreaterEqual);
    }
    return vertex_min(p);
}

/// Single-feature tube problem in closed form: each row confines w to an
/// interval, and the answer is the point of smallest magnitude in their
/// intersection.
inline std::optional<double> tube_min_1d(const Vec& x, const Vec& y, const std::vector<Index>& rows, double delta)
{
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Index i : rows) {
        if (x(i) == 0.0) {
            if (std::abs(y(i)) > delta) return std::nullopt;
            continue;
        }
        double a = (y(i) - delta) / x(i);
        double b = (y(i) + delta) / x(i);
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    if (lo > hi + 1e-12) return std::nullopt;
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return lo > 0.0 ? lo : -hi;
}

struct BruteForce {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
};

/// Best objective over all outlier sets of size <= budget.
inline BruteForce brute_force(const Mat& x, const Vec& y, double delta, Index budget)
{
    const auto m = static_cast<int>(x.rows());
    BruteForce out;
    for (int size = 0; size <= std::min<int>(static_cast<int>(budget), m); ++size) {
        for_each_combination(m, size, [&](const std::vector<int>& drop) {
            std::vector<Index> keep;
            for (int i = 0; i < m; ++i)
                if (std::find(drop.begin(), drop.end(), i) == drop.end()) keep.push_back(i);
            const auto v = x.cols() == 1 ? tube_min_1d(x.col(0), y, keep, delta) : tube_min(x, y, keep, delta);
            if (v && *v < out.objective) {
                out.objective = *v;
                out.feasible = true;
            }
        });
    }
    return out;
}

/// Random instance with a planted sparse model, bounded noise and a few
/// gross errors; entries rounded to a coarse grid so ties and degenerate
/// vertices occur.
inline srr::Dataset random_instance(std::mt19937_64& rng, Index m, Index n, double noise = 0.3,
                                    bool gross = true)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 3);
    Mat x(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) x(i, j) = std::round(u(rng) * 20.0) / 10.0;
    Vec w(n);
    for (Index j = 0; j < n; ++j) w(j) = coin(rng) == 0 ? 0.0 : std::round(u(rng) * 10.0) / 5.0;
    Vec y = x * w;
    for (Index i = 0; i < m; ++i) {
        y(i) += noise * u(rng);
        if (coin(rng) == 0 && gross) y(i) += 5.0 * u(rng);
    }
    return srr::make_dataset(std::move(x), std::move(y));
}

}  // namespace oracle
