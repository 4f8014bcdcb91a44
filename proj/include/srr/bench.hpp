#pragma once

// Synthetic data, evaluation metrics, cross-validation and the
// method-comparison harness.

#include "srr/core.hpp"
#include "srr/lasso.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace srr {

/// Portable seeded generator: std::mt19937_64 (bit-exact across standard
/// libraries) with the distributions implemented here, since the standard
/// library's distributions are implementation-defined.
///   uniform01: top 53 bits of one draw, times 2^-53, in [0, 1)
///   below(n):  rejection sampling on the raw 64-bit draw
///   normal:    Box-Muller, cosine branch only, u1 taken from (0, 1]
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
};

struct GenSpec {
    Index m = 50;
    Index n = 12;
    Index sparsity = 3;
    double coef_scale = 1.0;
    double noise_half_width = 0.144;
    Index outlier_count = 5;
    double outlier_magnitude = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Generated {
    Dataset data;
    VectorX<double> true_weights;
    std::vector<Index> outlier_indices;  // sorted
};

/// Draw order: support indices (partial Fisher-Yates), then per support
/// index a magnitude coef_scale * U[0.5, 1.5) and a sign; features N(0,1)
/// row by row; noise U[-h, h] per row; outlier indices (partial
/// Fisher-Yates, sorted). Outlier k in sorted order gets +magnitude when k
/// is even and -magnitude when odd.
Generated generate(const GenSpec& spec);

/// (1/m) sum (y_i - yhat_i)^2.
double mse(const Model& model, const Dataset& data);

using FitFn = std::function<Model(const Dataset&)>;

/// Seeded shuffle of [0, m) cut into k contiguous folds; the first m % k
/// folds are one larger. Indices within a fold are sorted.
std::vector<std::vector<Index>> make_folds(Index m, Index k, std::uint64_t seed);

struct CvScore {
    double mse = 0.0;          // mean held-out MSE over folds
    double inlier_rate = 0.0;  // mean held-out fraction with |r| <= delta
    std::vector<double> fold_mse;
    int escalations = 0;       // summed from fitted models
};

/// Mean held-out MSE.
double kfold_cv(const Dataset& data, Index k, std::uint64_t seed, const FitFn& fit_fn, int threads = 1);

CvScore kfold_cv_detail(const Dataset& data, Index k, std::uint64_t seed, const FitFn& fit_fn, double delta,
                        int threads = 1);

/// Log-spaced reg_strength grid over [lo_ratio, hi_ratio] * lambda_max,
/// selected by k-fold CV (ties prefer the larger penalty).
struct LassoGrid {
    int points = 20;
    double lo_ratio = 1e-4;
    double hi_ratio = 1.0;
    Index folds = 5;
    LassoConfig base;  // reg_strength is overwritten
};

std::vector<double> lasso_grid_values(const Dataset& data, const LassoGrid& grid);

Model fit_lasso_cv(const Dataset& data, const LassoGrid& grid, std::uint64_t seed);

/// fit() with the configured budget; if that is infeasible the budget is
/// raised one point at a time until a fit exists. The number of raises is
/// recorded in info.escalations.
Model fit_sparse_robust(const Dataset& data, const FitConfig& config);

struct EvalRow {
    std::string method;
    double mse = 0.0;
    double inlier_rate = 0.0;
    Index nonzero_count = 0;
    double fit_seconds = 0.0;
    int escalations = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // ascending MSE
    Index folds = 0;

    const EvalRow* find(const std::string& method) const;
    /// Wall-clock seconds are the only non-deterministic field; with
    /// timing off they print as "-" (table) or an empty cell (CSV).
    std::string to_table(bool timing = true) const;
    std::string to_csv(bool timing = true) const;
};

inline constexpr const char* kSparseRobustName = "sparse-robust";
inline constexpr const char* kLassoName = "lasso-cv";

EvalReport compare(const Dataset& data, const FitConfig& fit_config, const LassoGrid& lasso_grid, Index k,
                   std::uint64_t seed, int threads = 1);

/// Published MSEs from the welding case study (different data); display only.
struct ReferenceRow {
    const char* method;
    double mse;
};
inline constexpr ReferenceRow kReferenceMse[] = {
    {"SVM (non-linear)", 3.95},
    {"Lasso (linear)", 4.35},
    {"Sparse Robust Regression", 3.16},
};

}  // namespace srr
