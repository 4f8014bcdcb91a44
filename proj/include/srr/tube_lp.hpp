#pragma once

// Inner problem of the estimator: with the outlier set fixed, find the
// penalty-weighted L1-minimal w keeping every inlier inside the delta-tube,
//
//     min sum_j p_j |w_j|   s.t.   |y_i - w^T x_i| <= delta   (i in inliers).
//
// w is split as w+ - w- with both parts nonnegative, so the LP variables are
// [w+_0 .. w+_{n-1}, w-_0 .. w-_{n-1}] and every tube row becomes two rows.

#include "srr/core.hpp"
#include "srr/simplex.hpp"

#include <span>
#include <type_traits>

namespace srr {

using LpProblem = lp::Problem<double>;
using LpSolution = lp::Solution<double>;

template <typename Scalar>
lp::Problem<Scalar> build_l1_tube_lp(const MatrixX<Scalar>& features, const std::type_identity_t<VectorX<Scalar>>& response,
                                     std::span<const Index> inliers, std::type_identity_t<Scalar> delta,
                                     const std::type_identity_t<VectorX<Scalar>>& penalty_weights)
{
    const Index m = features.rows();
    const Index n = features.cols();
    if (response.size() != m) throw DimensionError("tube lp: response length mismatch");
    if (penalty_weights.size() != n) throw DimensionError("tube lp: penalty length mismatch");
    if (delta < Scalar(0)) throw std::invalid_argument("tube lp: delta must be >= 0");
    if ((penalty_weights.array() < Scalar(0)).any()) throw std::invalid_argument("tube lp: negative penalty");

    const auto k = static_cast<Index>(inliers.size());
    lp::Problem<Scalar> prob;
    prob.costs.resize(2 * n);
    prob.costs << penalty_weights, penalty_weights;
    prob.constraint_matrix.resize(2 * k, 2 * n);
    prob.rhs.resize(2 * k);
    prob.row_senses.resize(static_cast<std::size_t>(2 * k));
    for (Index r = 0; r < k; ++r) {
        const Index i = inliers[static_cast<std::size_t>(r)];
        if (i < 0 || i >= m) throw std::out_of_range("tube lp: inlier index out of range");
        const auto x = features.row(i);
        // x^T w >= y - delta
        prob.constraint_matrix.row(2 * r) << x, -x;
        prob.rhs(2 * r) = response(i) - delta;
        prob.row_senses[static_cast<std::size_t>(2 * r)] = lp::RowSense::GreaterEqual;
        // x^T w <= y + delta
        prob.constraint_matrix.row(2 * r + 1) << x, -x;
        prob.rhs(2 * r + 1) = response(i) + delta;
        prob.row_senses[static_cast<std::size_t>(2 * r + 1)] = lp::RowSense::LessEqual;
    }
    return prob;
}

template <typename Scalar>
lp::Problem<Scalar> build_l1_tube_lp(const BasicDataset<Scalar>& data, std::span<const Index> inliers,
                                     std::type_identity_t<Scalar> delta,
                                     const std::type_identity_t<VectorX<Scalar>>& penalty_weights)
{
    return build_l1_tube_lp(data.features, data.response, inliers, delta, penalty_weights);
}

/// Recovers w = w+ - w- from a tube LP primal.
template <typename Scalar>
VectorX<Scalar> tube_weights(const lp::Solution<Scalar>& sol, Index n)
{
    return sol.primal.head(n) - sol.primal.segment(n, n);
}

template <typename Scalar>
struct TubeSolve {
    lp::Status status = lp::Status::NumericalFailure;
    VectorX<Scalar> weights;
    Scalar objective = Scalar(0);
    std::string diagnostic;
};

template <typename Scalar>
TubeSolve<Scalar> solve_tube(const MatrixX<Scalar>& features, const std::type_identity_t<VectorX<Scalar>>& response,
                             std::span<const Index> inliers, std::type_identity_t<Scalar> delta,
                             const std::type_identity_t<VectorX<Scalar>>& penalty_weights)
{
    const auto sol = lp::solve(build_l1_tube_lp(features, response, inliers, delta, penalty_weights));
    TubeSolve<Scalar> out;
    out.status = sol.status;
    out.diagnostic = sol.diagnostic;
    if (sol.status == lp::Status::Optimal) {
        out.weights = tube_weights(sol, features.cols());
        out.objective = sol.objective;
    }
    return out;
}

}  // namespace srr
