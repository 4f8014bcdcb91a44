#pragma once

// Domain types shared by every module: datasets, fit configuration, linear
// models with an optional feature standardizer, and the tube predicate.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace srr {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Raised when operand shapes disagree (model vs. data, vector lengths).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// m observations of n features plus a response.
template <typename Scalar>
struct BasicDataset {
    MatrixX<Scalar> features;  // m x n
    VectorX<Scalar> response;  // m
    std::vector<std::string> feature_names;

    Index rows() const { return features.rows(); }
    Index cols() const { return features.cols(); }

    /// Checks the dataset invariants; throws std::invalid_argument.
    void validate() const
    {
        if (features.cols() < 1) throw std::invalid_argument("dataset needs at least one feature");
        if (response.size() != features.rows())
            throw DimensionError("response length " + std::to_string(response.size()) +
                                 " does not match " + std::to_string(features.rows()) + " rows");
        if (static_cast<Index>(feature_names.size()) != features.cols())
            throw DimensionError("expected " + std::to_string(features.cols()) + " feature names, got " +
                                 std::to_string(feature_names.size()));
        std::set<std::string> distinct(feature_names.begin(), feature_names.end());
        if (distinct.size() != feature_names.size())
            throw std::invalid_argument("feature names must be distinct");
        if (!features.allFinite() || !response.allFinite())
            throw std::invalid_argument("dataset contains non-finite values");
    }

    /// Rows selected by index, in the given order.
    BasicDataset subset(const std::vector<Index>& idx) const
    {
        BasicDataset out;
        out.features.resize(static_cast<Index>(idx.size()), cols());
        out.response.resize(static_cast<Index>(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            out.features.row(static_cast<Index>(r)) = features.row(idx[r]);
            out.response(static_cast<Index>(r)) = response(idx[r]);
        }
        out.feature_names = feature_names;
        return out;
    }
};

/// Default names x0..x{n-1}.
inline std::vector<std::string> default_feature_names(Index n)
{
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) names.push_back("x" + std::to_string(j));
    return names;
}

template <typename Scalar>
BasicDataset<Scalar> make_dataset(MatrixX<Scalar> features, std::type_identity_t<VectorX<Scalar>> response,
                                  std::vector<std::string> names = {})
{
    BasicDataset<Scalar> d;
    if (names.empty()) names = default_feature_names(features.cols());
    d.features = std::move(features);
    d.response = std::move(response);
    d.feature_names = std::move(names);
    d.validate();
    return d;
}

template <typename Scalar>
struct BasicFitConfig {
    Scalar delta = Scalar(0);  // tube half-width, response units
    Scalar c = Scalar(0);      // outlier fraction
    bool fit_intercept = false;
    bool standardize = false;

    void validate() const
    {
        if (!(delta >= Scalar(0)) || !std::isfinite(static_cast<double>(delta)))
            throw std::invalid_argument("delta must be finite and >= 0");
        if (!(c >= Scalar(0) && c <= Scalar(1))) throw std::invalid_argument("c must lie in [0, 1]");
    }

    /// floor(m*c), nudged upward by 1e-12 so that e.g. 50 * 0.10 gives 5.
    Index outlier_budget(Index m) const
    {
        const double raw = static_cast<double>(m) * static_cast<double>(c);
        auto b = static_cast<Index>(std::floor(raw + 1e-12));
        if (b < 0) b = 0;
        if (b > m) b = m;
        return b;
    }
};

/// Per-feature affine map x' = (x - mean) / scale.
template <typename Scalar>
struct BasicStandardizer {
    VectorX<Scalar> means;
    VectorX<Scalar> scales;

    template <typename Derived>
    VectorX<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const
    {
        return (x.derived().array() - means.array()) / scales.array();
    }
    template <typename Derived>
    VectorX<Scalar> invert(const Eigen::MatrixBase<Derived>& z) const
    {
        return z.derived().array() * scales.array() + means.array();
    }
    /// Row-wise application to an m x n matrix.
    MatrixX<Scalar> apply_rows(const MatrixX<Scalar>& x) const
    {
        return (x.rowwise() - means.transpose()).array().rowwise() / scales.transpose().array();
    }
    MatrixX<Scalar> invert_rows(const MatrixX<Scalar>& z) const
    {
        return (z.array().rowwise() * scales.transpose().array()).matrix().rowwise() + means.transpose();
    }
};

/// Free-form provenance attached to a fitted model.
struct ModelInfo {
    std::string method;
    bool converged = true;
    int iterations = 0;
    int escalations = 0;  // outlier-budget raises needed to reach feasibility
};

template <typename Scalar>
struct BasicModel {
    VectorX<Scalar> weights;
    Scalar intercept = Scalar(0);
    std::optional<BasicStandardizer<Scalar>> standardizer;
    BasicFitConfig<Scalar> config_echo;
    ModelInfo info;

    Index size() const { return weights.size(); }
};

using Dataset = BasicDataset<double>;
using FitConfig = BasicFitConfig<double>;
using Standardizer = BasicStandardizer<double>;
using Model = BasicModel<double>;

/// intercept + w^T x', where x' is x after the model's standardizer.
template <typename Scalar, typename Derived>
Scalar predict(const BasicModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x)
{
    if (x.size() != model.weights.size())
        throw DimensionError("predict: expected " + std::to_string(model.weights.size()) + " features, got " +
                             std::to_string(x.size()));
    if (model.standardizer) return model.intercept + model.weights.dot(model.standardizer->apply(x));
    return model.intercept + model.weights.dot(x.derived().template cast<Scalar>());
}

/// Predictions for every row of an m x n matrix.
template <typename Scalar>
VectorX<Scalar> predict_rows(const BasicModel<Scalar>& model, const MatrixX<Scalar>& x)
{
    if (x.cols() != model.weights.size())
        throw DimensionError("predict: expected " + std::to_string(model.weights.size()) + " features, got " +
                             std::to_string(x.cols()));
    VectorX<Scalar> out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) out(i) = predict(model, x.row(i).transpose());
    return out;
}

/// Signed residuals y_i - predict(model, x_i), in row order.
template <typename Scalar>
VectorX<Scalar> residuals(const BasicModel<Scalar>& model, const BasicDataset<Scalar>& data)
{
    if (data.cols() != model.weights.size())
        throw DimensionError("residuals: model has " + std::to_string(model.weights.size()) +
                             " weights, dataset has " + std::to_string(data.cols()) + " features");
    return data.response - predict_rows(model, data.features);
}

/// Number of residuals with |r_i| <= delta + tol.
template <typename Derived>
Index count_within(const Eigen::MatrixBase<Derived>& r, double delta, double tol)
{
    Index count = 0;
    for (Index i = 0; i < r.size(); ++i)
        if (std::abs(r(i)) <= delta + tol) ++count;
    return count;
}

template <typename Scalar>
Index inlier_count(const BasicModel<Scalar>& model, const BasicDataset<Scalar>& data, Scalar delta, Scalar tol)
{
    if (delta < Scalar(0) || tol < Scalar(0)) throw std::invalid_argument("inlier_count: delta and tol must be >= 0");
    return count_within(residuals(model, data), delta, tol);
}

/// Population z-scores per feature column; constant columns map to zero
/// with scale 1. The response is left untouched.
template <typename Scalar>
std::pair<BasicDataset<Scalar>, BasicStandardizer<Scalar>> standardize(const BasicDataset<Scalar>& data)
{
    const Index m = data.rows();
    if (m == 0) throw std::invalid_argument("standardize: dataset is empty");
    const Index n = data.cols();
    BasicStandardizer<Scalar> st;
    st.means.resize(n);
    st.scales.resize(n);
    for (Index j = 0; j < n; ++j) {
        const auto col = data.features.col(j);
        const bool constant = (col.array() == col(0)).all();
        if (constant) {
            st.means(j) = col(0);
            st.scales(j) = Scalar(1);
            continue;
        }
        const Scalar mean = col.mean();
        const Scalar var = (col.array() - mean).square().sum() / static_cast<Scalar>(m);
        st.means(j) = mean;
        st.scales(j) = var > Scalar(0) ? std::sqrt(var) : Scalar(1);
    }
    BasicDataset<Scalar> out = data;
    out.features = st.apply_rows(data.features);
    return {std::move(out), std::move(st)};
}

}  // namespace srr
