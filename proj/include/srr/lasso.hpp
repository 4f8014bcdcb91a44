#pragma once

// Lasso by cyclic coordinate descent on
//
//     (1 / (2m)) sum_i (y_i - w^T x_i - b)^2 + reg_strength * ||w||_1.

#include "srr/core.hpp"

#include <cmath>
#include <stdexcept>

namespace srr {

struct LassoConfig {
    double reg_strength = 0.0;
    int max_sweeps = 10000;
    double tol = 1e-10;
    bool fit_intercept = false;

    void validate() const
    {
        if (!(reg_strength >= 0.0)) throw std::invalid_argument("lasso: reg_strength must be >= 0");
        if (!(tol > 0.0)) throw std::invalid_argument("lasso: tol must be > 0");
        if (max_sweeps < 1) throw std::invalid_argument("lasso: max_sweeps must be >= 1");
    }
};

class SingularDesignError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// S(z, t) = sign(z) * max(|z| - t, 0).
template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar t)
{
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return Scalar(0);
}

/// Smallest reg_strength for which every coefficient is zero.
double lasso_lambda_max(const Dataset& data, bool fit_intercept);

/// Value of the lasso objective at (weights, intercept).
double lasso_objective(const Dataset& data, const VectorX<double>& weights, double intercept, double reg_strength);

/// info.converged is false when max_sweeps ran out first; info.iterations
/// counts sweeps.
Model fit_lasso(const Dataset& data, const LassoConfig& config);

}  // namespace srr
