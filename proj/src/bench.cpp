#include "srr/bench.hpp"

#include "srr/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace srr {

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // Largest multiple of n that fits, to avoid modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    while (true) {
        const std::uint64_t v = engine_();
        if (v < limit) return v % n;
    }
}

double Rng::normal()
{
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void GenSpec::validate() const
{
    if (m < 0) throw std::invalid_argument("gen: m must be >= 0");
    if (n < 1) throw std::invalid_argument("gen: n must be >= 1");
    if (sparsity < 0 || sparsity > n) throw std::invalid_argument("gen: sparsity must lie in [0, n]");
    if (outlier_count < 0 || outlier_count > m) throw std::invalid_argument("gen: outlier_count must lie in [0, m]");
    if (!(noise_half_width >= 0.0)) throw std::invalid_argument("gen: noise_half_width must be >= 0");
    if (!std::isfinite(coef_scale) || !std::isfinite(outlier_magnitude) || !std::isfinite(noise_half_width))
        throw std::invalid_argument("gen: parameters must be finite");
}

namespace {

// First k entries of a seeded Fisher-Yates shuffle of [0, n).
std::vector<Index> partial_shuffle(Rng& rng, Index n, Index k)
{
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    perm.resize(static_cast<std::size_t>(k));
    return perm;
}

}  // namespace

Generated generate(const GenSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    Generated g;
    g.true_weights = VectorX<double>::Zero(spec.n);
    for (Index j : partial_shuffle(rng, spec.n, spec.sparsity)) {
        const double mag = spec.coef_scale * rng.uniform(0.5, 1.5);
        g.true_weights(j) = (rng.next() & 1U) ? -mag : mag;
    }

    MatrixX<double> x(spec.m, spec.n);
    for (Index i = 0; i < spec.m; ++i)
        for (Index j = 0; j < spec.n; ++j) x(i, j) = rng.normal();

    const double h = spec.noise_half_width;
    VectorX<double> y(spec.m);
    for (Index i = 0; i < spec.m; ++i) {
        const double clean = x.row(i).dot(g.true_weights);
        const double u = h * (2.0 * rng.uniform01() - 1.0);
        double yi = clean + u;
        // Rounding in the addition must not push the point outside the band.
        while (std::abs(yi - clean) > h) yi = std::nextafter(yi, clean);
        y(i) = yi;
    }

    g.outlier_indices = partial_shuffle(rng, spec.m, spec.outlier_count);
    std::sort(g.outlier_indices.begin(), g.outlier_indices.end());
    for (std::size_t k = 0; k < g.outlier_indices.size(); ++k)
        y(g.outlier_indices[k]) += (k % 2 == 0 ? 1.0 : -1.0) * spec.outlier_magnitude;

    g.data = make_dataset(std::move(x), std::move(y));
    return g;
}

double mse(const Model& model, const Dataset& data)
{
    if (data.rows() == 0) throw std::invalid_argument("mse: dataset is empty");
    return residuals(model, data).squaredNorm() / static_cast<double>(data.rows());
}

std::vector<std::vector<Index>> make_folds(Index m, Index k, std::uint64_t seed)
{
    if (k < 2 || k > m) throw std::invalid_argument("kfold: k must lie in [2, m]");
    Rng rng(seed);
    std::vector<Index> perm = partial_shuffle(rng, m, m);
    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
    const Index base = m / k;
    const Index extra = m % k;
    Index pos = 0;
    for (Index f = 0; f < k; ++f) {
        const Index size = base + (f < extra ? 1 : 0);
        auto& fold = folds[static_cast<std::size_t>(f)];
        fold.assign(perm.begin() + pos, perm.begin() + pos + size);
        std::sort(fold.begin(), fold.end());
        pos += size;
    }
    return folds;
}

CvScore kfold_cv_detail(const Dataset& data, Index k, std::uint64_t seed, const FitFn& fit_fn, double delta,
                        int threads)
{
    const auto folds = make_folds(data.rows(), k, seed);
    struct FoldResult {
        double mse;
        double inlier_rate;
        int escalations;
    };
    auto run_fold = [&](std::size_t f) {
        std::vector<Index> train;
        const auto& test = folds[f];
        for (Index i = 0; i < data.rows(); ++i)
            if (!std::binary_search(test.begin(), test.end(), i)) train.push_back(i);
        const Model model = fit_fn(data.subset(train));
        const Dataset held_out = data.subset(test);
        const VectorX<double> r = residuals(model, held_out);
        return FoldResult{r.squaredNorm() / static_cast<double>(r.size()),
                          static_cast<double>(count_within(r, delta, 0.0)) / static_cast<double>(r.size()),
                          model.info.escalations};
    };

    std::vector<FoldResult> results(folds.size());
    if (threads <= 1) {
        for (std::size_t f = 0; f < folds.size(); ++f) results[f] = run_fold(f);
    } else {
        std::vector<std::future<FoldResult>> pending;
        for (std::size_t f = 0; f < folds.size(); ++f) pending.push_back(std::async(std::launch::async, run_fold, f));
        for (std::size_t f = 0; f < folds.size(); ++f) results[f] = pending[f].get();
    }

    // Reduction in fold order.
    CvScore score;
    for (const auto& r : results) {
        score.fold_mse.push_back(r.mse);
        score.mse += r.mse;
        score.inlier_rate += r.inlier_rate;
        score.escalations += r.escalations;
    }
    score.mse /= static_cast<double>(results.size());
    score.inlier_rate /= static_cast<double>(results.size());
    return score;
}

double kfold_cv(const Dataset& data, Index k, std::uint64_t seed, const FitFn& fit_fn, int threads)
{
    return kfold_cv_detail(data, k, seed, fit_fn, 0.0, threads).mse;
}

std::vector<double> lasso_grid_values(const Dataset& data, const LassoGrid& grid)
{
    if (grid.points < 1) throw std::invalid_argument("lasso grid: need at least one point");
    const double lmax = lasso_lambda_max(data, grid.base.fit_intercept);
    std::vector<double> values;
    const double lo = std::log(grid.lo_ratio);
    const double hi = std::log(grid.hi_ratio);
    for (int p = 0; p < grid.points; ++p) {
        const double t = grid.points == 1 ? 1.0 : static_cast<double>(p) / (grid.points - 1);
        values.push_back(lmax * std::exp(hi + (lo - hi) * t));  // descending
    }
    return values;
}

Model fit_lasso_cv(const Dataset& data, const LassoGrid& grid, std::uint64_t seed)
{
    const auto values = lasso_grid_values(data, grid);
    const Index k = std::min<Index>(grid.folds, data.rows());
    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = values.front();
    if (k >= 2) {
        for (double lambda : values) {
            LassoConfig cfg = grid.base;
            cfg.reg_strength = lambda;
            const double score = kfold_cv(data, k, seed, [&](const Dataset& d) { return fit_lasso(d, cfg); });
            if (score < best_score) {
                best_score = score;
                best_lambda = lambda;
            }
        }
    }
    LassoConfig cfg = grid.base;
    cfg.reg_strength = best_lambda;
    Model model = fit_lasso(data, cfg);
    model.info.method = kLassoName;
    return model;
}

Model fit_sparse_robust(const Dataset& data, const FitConfig& config)
{
    const Index m = data.rows();
    FitConfig cfg = config;
    Index budget = cfg.outlier_budget(m);
    int escalations = 0;
    while (true) {
        const FitResult res = fit(data, cfg);
        if (res.optimal()) {
            Model model = res.model;
            model.info.iterations = static_cast<int>(res.nodes_explored);
            model.info.escalations = escalations;
            return model;
        }
        if (budget >= m) throw std::runtime_error("sparse-robust fit infeasible at every budget");
        ++budget;
        ++escalations;
        cfg.c = static_cast<double>(budget) / static_cast<double>(m);
    }
}

const EvalRow* EvalReport::find(const std::string& method) const
{
    for (const auto& r : rows)
        if (r.method == method) return &r;
    return nullptr;
}

std::string EvalReport::to_table(bool timing) const
{
    std::ostringstream os;
    os << std::left << std::setw(16) << "method" << std::right << std::setw(14) << "cv_mse" << std::setw(13)
       << "inlier_rate" << std::setw(10) << "nonzeros" << std::setw(11) << "seconds" << '\n';
    for (const auto& r : rows) {
        os << std::left << std::setw(16) << r.method << std::right << std::fixed << std::setprecision(6)
           << std::setw(14) << r.mse << std::setprecision(4) << std::setw(13) << r.inlier_rate << std::setw(10)
           << r.nonzero_count << std::setprecision(4) << std::setw(11);
        if (timing)
            os << r.fit_seconds << '\n';
        else
            os << "-" << '\n';
    }
    os << "(" << folds << "-fold cross-validated held-out MSE)\n";
    return os.str();
}

std::string EvalReport::to_csv(bool timing) const
{
    std::ostringstream os;
    os << "method,mse,inlier_rate,nonzeros,seconds\n";
    os << std::setprecision(17);
    for (const auto& r : rows)
    {
        os << r.method << ',' << r.mse << ',' << r.inlier_rate << ',' << r.nonzero_count << ',';
        if (timing) os << r.fit_seconds;
        os << '\n';
    }
    return os.str();
}

EvalReport compare(const Dataset& data, const FitConfig& fit_config, const LassoGrid& lasso_grid, Index k,
                   std::uint64_t seed, int threads)
{
    struct Method {
        std::string name;
        FitFn fit;
    };
    const std::vector<Method> methods = {
        {kSparseRobustName, [&](const Dataset& d) { return fit_sparse_robust(d, fit_config); }},
        {kLassoName, [&](const Dataset& d) { return fit_lasso_cv(d, lasso_grid, seed); }},
    };

    EvalReport report;
    report.folds = k;
    for (const auto& method : methods) {
        EvalRow row;
        row.method = method.name;
        const CvScore cv = kfold_cv_detail(data, k, seed, method.fit, fit_config.delta, threads);
        row.mse = cv.mse;
        row.inlier_rate = cv.inlier_rate;
        row.escalations = cv.escalations;
        const auto t0 = std::chrono::steady_clock::now();
        const Model full = method.fit(data);
        row.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.nonzero_count = (full.weights.array().abs() > 1e-9).count();
        report.rows.push_back(std::move(row));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const EvalRow& a, const EvalRow& b) { return a.mse < b.mse; });
    return report;
}

}  // namespace srr
