#include "srr/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace srr {

namespace {

struct Centered {
    MatrixX<double> x;
    VectorX<double> y;
    VectorX<double> x_mean;
    double y_mean = 0.0;
};

Centered center(const Dataset& data, bool fit_intercept)
{
    Centered c{data.features, data.response, VectorX<double>::Zero(data.cols()), 0.0};
    if (fit_intercept && data.rows() > 0) {
        c.x_mean = data.features.colwise().mean().transpose();
        c.y_mean = data.response.mean();
        c.x.rowwise() -= c.x_mean.transpose();
        c.y.array() -= c.y_mean;
    }
    return c;
}

}  // namespace

double lasso_lambda_max(const Dataset& data, bool fit_intercept)
{
    if (data.rows() == 0) return 0.0;
    const auto c = center(data, fit_intercept);
    // Same arithmetic as the first coordinate pass of fit_lasso, so that
    // reg_strength = lambda_max kills every coordinate exactly.
    const double inv_m = 1.0 / static_cast<double>(data.rows());
    double best = 0.0;
    for (Index j = 0; j < c.x.cols(); ++j) best = std::max(best, std::abs(c.x.col(j).dot(c.y) * inv_m));
    return best;
}

double lasso_objective(const Dataset& data, const VectorX<double>& weights, double intercept, double reg_strength)
{
    const VectorX<double> r = data.response - data.features * weights - VectorX<double>::Constant(data.rows(), intercept);
    return r.squaredNorm() / (2.0 * static_cast<double>(data.rows())) + reg_strength * weights.lpNorm<1>();
}

Model fit_lasso(const Dataset& data, const LassoConfig& config)
{
    config.validate();
    const Index m = data.rows();
    const Index n = data.cols();
    if (m < 1) throw std::invalid_argument("fit_lasso: dataset is empty");
    if (config.reg_strength == 0.0 && (data.features.array() == 0.0).all())
        throw SingularDesignError("fit_lasso: all-zero feature matrix with reg_strength = 0");

    const auto c = center(data, config.fit_intercept);
    const double inv_m = 1.0 / static_cast<double>(m);
    const VectorX<double> col_sq = c.x.colwise().squaredNorm().transpose() * inv_m;

    VectorX<double> w = VectorX<double>::Zero(n);
    VectorX<double> r = c.y;  // residual for the current w
    int sweeps = 0;
    bool converged = false;
    while (sweeps < config.max_sweeps) {
        ++sweeps;
        double max_change = 0.0;
        for (Index j = 0; j < n; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double old = w(j);
            const double rho = c.x.col(j).dot(r) * inv_m + col_sq(j) * old;
            const double updated = soft_threshold(rho, config.reg_strength) / col_sq(j);
            if (updated != old) {
                r.noalias() -= (updated - old) * c.x.col(j);
                w(j) = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (max_change <= config.tol) {
            converged = true;
            break;
        }
    }

    Model model;
    model.weights = w;
    model.intercept = config.fit_intercept ? c.y_mean - c.x_mean.dot(w) : 0.0;
    model.config_echo.fit_intercept = config.fit_intercept;
    model.info.method = "lasso";
    model.info.converged = converged;
    model.info.iterations = sweeps;
    return model;
}

}  // namespace srr
