#pragma once

// Exact solver for the outlier-budgeted L1 tube estimator
//
//     min sum_j |w_j|
//     s.t. |y_i - w^T x_i| <= delta + M_i lambda_i,   sum_i lambda_i <= floor(m c),
//          lambda_i in {0, 1}.
//
// fit() solves it in indicator form (lambda_i = 1 removes row i) with a
// depth-first branch-and-bound over the outlier flags; enumerate_exact() is
// the brute-force reference over all admissible outlier sets. Big-M values
// are only materialized by export_milp() for external cross-checks.

#include "srr/core.hpp"
#include "srr/lp_format.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace srr {

enum class FitStatus { ProvenOptimal, Infeasible, BudgetExhaustedInfeasible };

const char* to_string(FitStatus s);

/// Raised when the inner LP reports a numerical breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitResult {
    Model model;                     // meaningful only when status is ProvenOptimal
    std::vector<bool> outlier_flags; // lambda
    double objective = 0.0;          // sum |weights_j|, intercept excluded
    FitStatus status = FitStatus::Infeasible;
    long nodes_explored = 0;
    bool oracle_verified = false;
    Index outlier_budget = 0;

    bool optimal() const { return status == FitStatus::ProvenOptimal; }
    std::vector<Index> outlier_indices() const;
};

/// Search state over the outlier flags.
struct BnbNode {
    std::vector<Index> committed_inliers;
    std::vector<Index> committed_outliers;
    double lower_bound = 0.0;
};

struct SolverOptions {
    int threads = 1;  // used by enumerate_exact only; fit is sequential
};

FitResult fit(const Dataset& data, const FitConfig& config, const SolverOptions& options = {});

/// Refuses (std::invalid_argument) when m > max_m.
FitResult enumerate_exact(const Dataset& data, const FitConfig& config, Index max_m = 15,
                          const SolverOptions& options = {});

class BigMError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-row deactivation constants valid for every w with ||w||_1 <= U,
/// where U is a heuristic upper bound on the optimal objective.
VectorX<double> compute_big_m(const Dataset& data, const FitConfig& config);

struct MilpExport {
    VectorX<double> big_m;
    MilpModel model;
    std::string text;
};

MilpExport export_milp(const Dataset& data, const FitConfig& config);

/// Values of the export's variables for a fitted (w, lambda).
Assignment export_assignment(const FitResult& result);

namespace detail {

/// Design matrix actually seen by the solver: standardized features when
/// requested, plus a trailing all-ones column (zero penalty) for an intercept.
struct Design {
    MatrixX<double> x;
    VectorX<double> y;
    VectorX<double> penalty;
    std::optional<Standardizer> standardizer;
    Index n_features = 0;
    bool intercept = false;
};

Design make_design(const Dataset& data, const FitConfig& config);

}  // namespace detail

}  // namespace srr
