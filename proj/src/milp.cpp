#include "srr/milp.hpp"

#include "srr/tube_lp.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <thread>

namespace srr {

namespace {

constexpr double kTieTol = 1e-9;
constexpr double kTubeTol = 1e-9;

struct Candidate {
    double objective = 0.0;
    VectorX<double> weights;  // design space, intercept last when present
    std::vector<Index> outliers;
};

// Strictly better by more than kTieTol, or tied with a lexicographically
// smaller outlier set.
bool better(const Candidate& a, const Candidate& b)
{
    if (a.objective < b.objective - kTieTol) return true;
    if (a.objective > b.objective + kTieTol) return false;
    return std::lexicographical_compare(a.outliers.begin(), a.outliers.end(), b.outliers.begin(), b.outliers.end());
}

Model make_model(const detail::Design& d, const VectorX<double>& w, const FitConfig& config)
{
    Model model;
    model.weights = w.head(d.n_features);
    model.intercept = d.intercept ? w(d.n_features) : 0.0;
    model.standardizer = d.standardizer;
    model.config_echo = config;
    model.info.method = "sparse-robust";
    return model;
}

double l1_objective(const detail::Design& d, const VectorX<double>& w)
{
    return w.head(d.n_features).lpNorm<1>();
}

class Problem {
public:
    Problem(const Dataset& data, const FitConfig& config)
        : data_(data), config_(config), design_(detail::make_design(data, config)),
          budget_(config.outlier_budget(data.rows()))
    {
    }

    const detail::Design& design() const { return design_; }
    Index budget() const { return budget_; }
    Index m() const { return design_.x.rows(); }

    TubeSolve<double> solve(std::span<const Index> inliers) const
    {
        auto res = solve_tube(design_.x, design_.y, inliers, config_.delta, design_.penalty);
        if (res.status == lp::Status::NumericalFailure || res.status == lp::Status::Unbounded)
            throw NumericalError(std::string("inner LP failed: ") + lp::to_string(res.status) +
                                 (res.diagnostic.empty() ? "" : " (" + res.diagnostic + ")"));
        return res;
    }

    // Outliers are exactly the points left outside the tube by w.
    Candidate candidate(const VectorX<double>& w) const
    {
        Candidate c;
        c.weights = w;
        c.objective = l1_objective(design_, w);
        const Model model = make_model(design_, w, config_);
        const VectorX<double> r = residuals(model, data_);
        for (Index i = 0; i < r.size(); ++i)
            if (std::abs(r(i)) > config_.delta + kTubeTol) c.outliers.push_back(i);
        if (static_cast<Index>(c.outliers.size()) > budget_)
            throw NumericalError("inner LP solution violates committed inlier rows");
        return c;
    }

    FitResult finish(const std::optional<Candidate>& best, long nodes) const
    {
        FitResult res;
        res.nodes_explored = nodes;
        res.outlier_budget = budget_;
        res.outlier_flags.assign(static_cast<std::size_t>(m()), false);
        if (!best) {
            res.status = budget_ == 0 ? FitStatus::Infeasible : FitStatus::BudgetExhaustedInfeasible;
            return res;
        }
        res.status = FitStatus::ProvenOptimal;
        res.model = make_model(design_, best->weights, config_);
        res.objective = best->objective;
        for (Index i : best->outliers) res.outlier_flags[static_cast<std::size_t>(i)] = true;
        return res;
    }

private:
    const Dataset& data_;
    FitConfig config_;
    detail::Design design_;
    Index budget_;
};

struct SearchNode {
    BnbNode node;
    std::optional<TubeSolve<double>> cached;  // LP on committed inliers, when inherited
};

std::vector<Index> sorted_insert(std::vector<Index> v, Index i)
{
    v.insert(std::upper_bound(v.begin(), v.end(), i), i);
    return v;
}

}  // namespace

const char* to_string(FitStatus s)
{
    switch (s) {
    case FitStatus::ProvenOptimal: return "ProvenOptimal";
    case FitStatus::Infeasible: return "Infeasible";
    case FitStatus::BudgetExhaustedInfeasible: return "BudgetExhaustedInfeasible";
    }
    return "?";
}

std::vector<Index> FitResult::outlier_indices() const
{
    std::vector<Index> out;
    for (std::size_t i = 0; i < outlier_flags.size(); ++i)
        if (outlier_flags[i]) out.push_back(static_cast<Index>(i));
    return out;
}

namespace detail {

Design make_design(const Dataset& data, const FitConfig& config)
{
    data.validate();
    config.validate();
    Design d;
    d.n_features = data.cols();
    d.intercept = config.fit_intercept;
    d.y = data.response;
    MatrixX<double> x = data.features;
    if (config.standardize && data.rows() > 0) {
        auto [scaled, st] = standardize(data);
        x = std::move(scaled.features);
        d.standardizer = std::move(st);
    }
    const Index cols = d.n_features + (d.intercept ? 1 : 0);
    d.x.resize(data.rows(), cols);
    d.x.leftCols(d.n_features) = x;
    d.penalty = VectorX<double>::Ones(cols);
    if (d.intercept) {
        d.x.col(d.n_features).setOnes();
        d.penalty(d.n_features) = 0.0;
    }
    return d;
}

}  // namespace detail

FitResult fit(const Dataset& data, const FitConfig& config, const SolverOptions&)
{
    if (data.rows() < 1) throw std::invalid_argument("fit: dataset is empty");
    const Problem prob(data, config);
    const Index m = prob.m();
    const Index budget = prob.budget();
    const auto& d = prob.design();

    std::optional<Candidate> incumbent;
    long nodes = 0;
    auto offer = [&](Candidate c) {
        if (!incumbent || better(c, *incumbent)) incumbent = std::move(c);
    };

    std::vector<SearchNode> stack;
    stack.push_back({});
    std::vector<char> decided(static_cast<std::size_t>(m));
    while (!stack.empty()) {
        SearchNode cur = std::move(stack.back());
        stack.pop_back();
        ++nodes;
        BnbNode& node = cur.node;

        const TubeSolve<double> lp = cur.cached ? *cur.cached : prob.solve(node.committed_inliers);
        if (lp.status == lp::Status::Infeasible) continue;
        node.lower_bound = lp.objective;
        if (incumbent && node.lower_bound >= incumbent->objective - kTieTol) continue;

        // Undecided points outside the tube at this node's w, most violated first.
        std::fill(decided.begin(), decided.end(), 0);
        for (Index i : node.committed_inliers) decided[static_cast<std::size_t>(i)] = 1;
        for (Index i : node.committed_outliers) decided[static_cast<std::size_t>(i)] = 1;
        const VectorX<double> r = d.y - d.x * lp.weights;
        std::vector<std::pair<double, Index>> violated;
        for (Index i = 0; i < m; ++i) {
            if (decided[static_cast<std::size_t>(i)]) continue;
            const double excess = std::abs(r(i)) - config.delta;
            if (excess > kTubeTol) violated.emplace_back(excess, i);
        }
        std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });

        const Index remaining = budget - static_cast<Index>(node.committed_outliers.size());
        if (static_cast<Index>(violated.size()) <= remaining) {
            // Flagging the violators completes this node at its own lower bound.
            offer(prob.candidate(lp.weights));
            continue;
        }
        if (remaining == 0) {
            std::vector<Index> all_in;
            for (Index i = 0; i < m; ++i)
                if (!std::binary_search(node.committed_outliers.begin(), node.committed_outliers.end(), i))
                    all_in.push_back(i);
            ++nodes;
            const auto leaf = prob.solve(all_in);
            if (leaf.status == lp::Status::Optimal) offer(prob.candidate(leaf.weights));
            continue;
        }

        const Index p = violated.front().second;
        SearchNode as_inlier;
        as_inlier.node.committed_inliers = sorted_insert(node.committed_inliers, p);
        as_inlier.node.committed_outliers = node.committed_outliers;
        as_inlier.node.lower_bound = node.lower_bound;
        SearchNode as_outlier;
        as_outlier.node.committed_inliers = node.committed_inliers;
        as_outlier.node.committed_outliers = sorted_insert(node.committed_outliers, p);
        as_outlier.node.lower_bound = node.lower_bound;
        as_outlier.cached = lp;
        stack.push_back(std::move(as_inlier));
        stack.push_back(std::move(as_outlier));
    }
    return prob.finish(incumbent, nodes);
}

FitResult enumerate_exact(const Dataset& data, const FitConfig& config, Index max_m, const SolverOptions& options)
{
    if (data.rows() < 1) throw std::invalid_argument("enumerate_exact: dataset is empty");
    if (data.rows() > max_m)
        throw std::invalid_argument("enumerate_exact: m = " + std::to_string(data.rows()) + " exceeds max_m = " +
                                    std::to_string(max_m));
    const Problem prob(data, config);
    const Index m = prob.m();
    const Index budget = prob.budget();

    // All outlier sets of size <= budget, by size then lexicographically.
    std::vector<std::vector<Index>> subsets;
    for (Index k = 0; k <= budget; ++k) {
        std::vector<Index> comb(static_cast<std::size_t>(k));
        std::iota(comb.begin(), comb.end(), Index{0});
        while (true) {
            subsets.push_back(comb);
            Index pos = k - 1;
            while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
            if (pos < 0) break;
            ++comb[static_cast<std::size_t>(pos)];
            for (Index q = pos + 1; q < k; ++q)
                comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
        }
    }

    std::vector<std::optional<Candidate>> results(subsets.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<Index> inliers;
        for (std::size_t s = begin; s < end; ++s) {
            inliers.clear();
            const auto& out = subsets[s];
            for (Index i = 0; i < m; ++i)
                if (!std::binary_search(out.begin(), out.end(), i)) inliers.push_back(i);
            const auto lp = prob.solve(inliers);
            if (lp.status == lp::Status::Optimal) results[s] = prob.candidate(lp.weights);
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, options.threads));
    if (threads == 1 || subsets.size() < 2 * threads) {
        work(0, subsets.size());
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (subsets.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = std::min(subsets.size(), t * chunk);
            const std::size_t e = std::min(subsets.size(), b + chunk);
            pool.emplace_back([&, t, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    // Sequential reduction in subset order keeps the answer schedule independent.
    std::optional<Candidate> best;
    for (auto& c : results)
        if (c && (!best || better(*c, *best))) best = std::move(c);
    return prob.finish(best, static_cast<long>(subsets.size()));
}

VectorX<double> compute_big_m(const Dataset& data, const FitConfig& config)
{
    const Problem prob(data, config);
    const auto& d = prob.design();
    const Index m = prob.m();

    // Greedy trim: drop the worst least-squares residual until the tube LP
    // becomes feasible or the budget runs out.
    std::vector<Index> inliers(static_cast<std::size_t>(m));
    std::iota(inliers.begin(), inliers.end(), Index{0});
    std::optional<double> upper;
    for (Index dropped = 0; dropped <= prob.budget(); ++dropped) {
        const auto lp = prob.solve(inliers);
        if (lp.status == lp::Status::Optimal) {
            upper = l1_objective(d, lp.weights);
            break;
        }
        if (inliers.empty() || dropped == prob.budget()) break;
        MatrixX<double> x(static_cast<Index>(inliers.size()), d.x.cols());
        VectorX<double> y(static_cast<Index>(inliers.size()));
        for (std::size_t r = 0; r < inliers.size(); ++r) {
            x.row(static_cast<Index>(r)) = d.x.row(inliers[r]);
            y(static_cast<Index>(r)) = d.y(inliers[r]);
        }
        const VectorX<double> w_ls = x.completeOrthogonalDecomposition().solve(y);
        Index worst = 0;
        (y - x * w_ls).cwiseAbs().maxCoeff(&worst);
        inliers.erase(inliers.begin() + worst);
    }
    if (!upper) {
        const FitResult exact = fit(data, config);
        if (!exact.optimal())
            throw BigMError("no finite big-M exists: the program is infeasible at this budget; use the indicator-form fit");
        upper = exact.objective;
    }

    const double u = *upper;
    const double delta = config.delta;
    VectorX<double> reach(m);
    for (Index i = 0; i < m; ++i) {
        const double xmax = d.n_features > 0 ? d.x.row(i).head(d.n_features).cwiseAbs().maxCoeff() : 0.0;
        reach(i) = std::abs(d.y(i)) + u * xmax;
    }
    // An intercept is unpenalized; any inlier pins it to within reach + delta.
    const double intercept_bound = d.intercept && m > 0 ? reach.maxCoeff() + delta : 0.0;
    return (reach.array() + intercept_bound + delta).matrix();
}

MilpExport export_milp(const Dataset& data, const FitConfig& config)
{
    MilpExport out;
    out.big_m = compute_big_m(data, config);
    const auto d = detail::make_design(data, config);
    const Index m = d.x.rows();
    const Index n = d.n_features;
    const Index budget = config.outlier_budget(m);

    auto wp = [](Index j) { return "wp" + std::to_string(j); };
    auto wn = [](Index j) { return "wn" + std::to_string(j); };
    auto lam = [](Index i) { return "lam" + std::to_string(i); };

    MilpModel& model = out.model;
    model.comment = "sparse robust tube regression, m=" + std::to_string(m) + " n=" + std::to_string(n) +
                    " delta=" + format_double(config.delta) + " budget=" + std::to_string(budget) +
                    (d.standardizer ? " (standardized features)" : "");
    for (Index j = 0; j < n; ++j) {
        model.objective.push_back({wp(j), 1.0});
        model.objective.push_back({wn(j), 1.0});
    }
    for (Index i = 0; i < m; ++i) {
        std::vector<LinearTerm> lhs;
        for (Index j = 0; j < n; ++j) {
            const double a = d.x(i, j);
            if (a == 0.0) continue;
            lhs.push_back({wp(j), a});
            lhs.push_back({wn(j), -a});
        }
        if (d.intercept) lhs.push_back({"b", 1.0});
        const double big_m = out.big_m(i);
        LinearRow lo{"r" + std::to_string(i) + "_lo", lhs, lp::RowSense::GreaterEqual, d.y(i) - config.delta};
        lo.terms.push_back({lam(i), big_m});
        LinearRow hi{"r" + std::to_string(i) + "_hi", lhs, lp::RowSense::LessEqual, d.y(i) + config.delta};
        hi.terms.push_back({lam(i), -big_m});
        model.rows.push_back(std::move(lo));
        model.rows.push_back(std::move(hi));
    }
    LinearRow budget_row{"budget", {}, lp::RowSense::LessEqual, static_cast<double>(budget)};
    for (Index i = 0; i < m; ++i) budget_row.terms.push_back({lam(i), 1.0});
    model.rows.push_back(std::move(budget_row));
    for (Index j = 0; j < n; ++j) {
        model.bounds.push_back({wp(j), 0.0, std::numeric_limits<double>::infinity()});
        model.bounds.push_back({wn(j), 0.0, std::numeric_limits<double>::infinity()});
    }
    if (d.intercept)
        model.bounds.push_back({"b", -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
    for (Index i = 0; i < m; ++i) model.binaries.push_back(lam(i));
    out.text = write_lp_format(model);
    return out;
}

Assignment export_assignment(const FitResult& result)
{
    Assignment values;
    const auto& w = result.model.weights;
    for (Index j = 0; j < w.size(); ++j) {
        values["wp" + std::to_string(j)] = std::max(w(j), 0.0);
        values["wn" + std::to_string(j)] = std::max(-w(j), 0.0);
    }
    if (result.model.config_echo.fit_intercept) values["b"] = result.model.intercept;
    for (std::size_t i = 0; i < result.outlier_flags.size(); ++i)
        values["lam" + std::to_string(i)] = result.outlier_flags[i] ? 1.0 : 0.0;
    return values;
}

}  // namespace srr
