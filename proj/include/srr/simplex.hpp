#pragma once

// Dense two-phase primal simplex for
//
//     min c^T x   s.t.   A_i x (<=, =, >=) b_i,   x >= l.
//
// Dantzig pricing; after a streak of degenerate pivots the solver falls back
// to Bland's rule until the next non-degenerate pivot. The final basis is
// re-factorized with an LU to recover the primal and dual vectors, and every
// Optimal answer is verified (primal feasibility, dual feasibility, duality
// gap) before it is returned.

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace srr::lp {

enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

template <typename Scalar>
struct Problem {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> costs;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> constraint_matrix;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs;
    std::vector<RowSense> row_senses;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> variable_lower_bounds;  // empty means all zero

    Eigen::Index num_rows() const { return constraint_matrix.rows(); }
    Eigen::Index num_cols() const { return constraint_matrix.cols(); }

    void validate() const
    {
        const auto m = constraint_matrix.rows();
        const auto n = constraint_matrix.cols();
        if (costs.size() != n) throw std::invalid_argument("lp: cost vector length mismatch");
        if (rhs.size() != m) throw std::invalid_argument("lp: rhs length mismatch");
        if (static_cast<Eigen::Index>(row_senses.size()) != m) throw std::invalid_argument("lp: row sense count mismatch");
        if (variable_lower_bounds.size() != 0 && variable_lower_bounds.size() != n)
            throw std::invalid_argument("lp: lower bound length mismatch");
        if (!costs.allFinite() || !constraint_matrix.allFinite() || !rhs.allFinite() ||
            !variable_lower_bounds.allFinite())
            throw std::invalid_argument("lp: non-finite entry");
    }
};

template <typename Scalar>
struct Solution {
    Status status = Status::NumericalFailure;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> primal;
    /// One multiplier per row: <= rows carry y <= 0, >= rows y >= 0.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dual;
    Scalar objective = std::numeric_limits<Scalar>::quiet_NaN();
    int iterations = 0;
    std::string diagnostic;  // reason for NumericalFailure
};

template <typename Scalar>
struct Options {
    Scalar pivot_tol = Scalar(1e-10);
    Scalar feasibility_tol = Scalar(1e-9);
    Scalar optimality_tol = Scalar(1e-9);
    int bland_after_degenerate = 50;
    int max_iterations = 0;  // 0: derived from the problem size
};

namespace detail {

inline constexpr int kMaxRefactorizations = 3;

template <typename Scalar>
class Tableau {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

    enum class Outcome { Optimal, Unbounded, IterationLimit };

    Tableau(const Matrix& a_eq, const Vector& b_eq, std::vector<Eigen::Index> basis, const Options<Scalar>& opt)
        : opt_(opt), m_(a_eq.rows()), cols_(a_eq.cols()), basis_(std::move(basis))
    {
        // Initial basis columns form an identity, so B^{-1}A = A.
        tab_.resize(m_, cols_ + 1);
        tab_.leftCols(cols_) = a_eq;
        tab_.col(cols_) = b_eq;
        barred_.assign(static_cast<std::size_t>(cols_), false);
    }

    void bar(Eigen::Index j) { barred_[static_cast<std::size_t>(j)] = true; }

    void set_costs(const Vector& c)
    {
        cost_ = c;
        reduced_ = c.transpose();
        for (Eigen::Index r = 0; r < m_; ++r) {
            const Scalar cb = c(basis_[static_cast<std::size_t>(r)]);
            if (cb != Scalar(0)) reduced_ -= cb * tab_.row(r).head(cols_);
        }
    }

    Scalar objective() const
    {
        Scalar z = 0;
        for (Eigen::Index r = 0; r < m_; ++r) z += cost_(basis_[static_cast<std::size_t>(r)]) * tab_(r, cols_);
        return z;
    }

    Outcome run(int max_iterations, int& iterations)
    {
        int degenerate_streak = 0;
        bool bland = false;
        while (true) {
            if (iterations >= max_iterations) return Outcome::IterationLimit;
            const Eigen::Index enter = choose_entering(bland);
            if (enter < 0) return Outcome::Optimal;
            const Eigen::Index leave = choose_leaving(enter, bland);
            if (leave < 0) return Outcome::Unbounded;
            const Scalar step = std::max(Scalar(0), tab_(leave, cols_)) / tab_(leave, enter);
            pivot(leave, enter);
            ++iterations;
            if (step <= opt_.pivot_tol) {
                if (++degenerate_streak >= opt_.bland_after_degenerate) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
    }

    void pivot(Eigen::Index r, Eigen::Index j)
    {
        tab_.row(r) /= tab_(r, j);
        Vector factors = tab_.col(j);
        factors(r) = Scalar(0);
        tab_.noalias() -= factors * tab_.row(r);
        tab_.col(j).setZero();
        tab_(r, j) = Scalar(1);
        const Scalar d = reduced_(j);
        if (d != Scalar(0)) reduced_ -= d * tab_.row(r).head(cols_);
        reduced_(j) = Scalar(0);
        basis_[static_cast<std::size_t>(r)] = j;
    }

    /// Rebuilds B^{-1}A and B^{-1}b from scratch for the current basis.
    bool reinvert(const Matrix& a_eq, const Vector& b_eq)
    {
        Matrix basis_mat(m_, m_);
        for (Eigen::Index r = 0; r < m_; ++r) basis_mat.col(r) = a_eq.col(basis_[static_cast<std::size_t>(r)]);
        Eigen::FullPivLU<Matrix> lu(basis_mat);
        if (!lu.isInvertible()) return false;
        tab_.leftCols(cols_) = lu.solve(a_eq);
        tab_.col(cols_) = lu.solve(b_eq);
        for (Eigen::Index r = 0; r < m_; ++r) {
            // Basic columns are exact unit vectors.
            const Eigen::Index j = basis_[static_cast<std::size_t>(r)];
            tab_.col(j).setZero();
            tab_(r, j) = Scalar(1);
        }
        set_costs(cost_);
        return true;
    }

    const Matrix& tab() const { return tab_; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }
    Eigen::Index rows() const { return m_; }
    Eigen::Index cols() const { return cols_; }

private:
    Eigen::Index choose_entering(bool bland) const
    {
        Eigen::Index best = -1;
        Scalar best_val = -opt_.optimality_tol;
        for (Eigen::Index j = 0; j < cols_; ++j) {
            if (barred_[static_cast<std::size_t>(j)]) continue;
            const Scalar d = reduced_(j);
            if (d < -opt_.optimality_tol) {
                if (bland) return j;
                if (d < best_val) {
                    best_val = d;
                    best = j;
                }
            }
        }
        return best;
    }

    // Bland mode: textbook minimum ratio, ties to the smallest basic index.
    // Otherwise a two-pass (Harris) test: among rows whose ratio is within a
    // small relaxation of the minimum, take the largest pivot element.
    Eigen::Index choose_leaving(Eigen::Index enter, bool bland) const
    {
        constexpr Scalar kRelax = Scalar(1e-11);
        Scalar theta = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index r = 0; r < m_; ++r) {
            const Scalar a = tab_(r, enter);
            if (a <= opt_.pivot_tol) continue;
            const Scalar rhs = std::max(Scalar(0), tab_(r, cols_));
            theta = std::min(theta, (bland ? rhs : rhs + kRelax) / a);
        }
        if (!std::isfinite(theta)) return -1;
        Eigen::Index best = -1;
        for (Eigen::Index r = 0; r < m_; ++r) {
            const Scalar a = tab_(r, enter);
            if (a <= opt_.pivot_tol) continue;
            const Scalar ratio = std::max(Scalar(0), tab_(r, cols_)) / a;
            if (bland) {
                if (ratio <= theta * (Scalar(1) + Scalar(1e-12)) &&
                    (best < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(best)]))
                    best = r;
            } else if (ratio <= theta && (best < 0 || a > tab_(best, enter))) {
                best = r;
            }
        }
        return best;
    }

    Options<Scalar> opt_;
    Eigen::Index m_;
    Eigen::Index cols_;
    std::vector<Eigen::Index> basis_;
    Matrix tab_;
    Vector cost_;
    RowVector reduced_;
    std::vector<bool> barred_;
};

}  // namespace detail

/// Solves the LP. Never throws for well-formed input; breakdowns are
/// reported as Status::NumericalFailure.
template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options<Scalar>& opt = {})
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Eigen::Index;

    problem.validate();
    const Index m = problem.num_rows();
    const Index n = problem.num_cols();

    Solution<Scalar> sol;
    auto fail = [&sol](const char* why) {
        sol.status = Status::NumericalFailure;
        sol.diagnostic = why;
        return sol;
    };
    const Vector lower = problem.variable_lower_bounds.size() == n ? problem.variable_lower_bounds : Vector::Zero(n);
    // Shift x = lower + x', x' >= 0.
    const Vector b = problem.rhs - problem.constraint_matrix * lower;
    const Scalar cost_offset = problem.costs.dot(lower);

    // Equality form [A | slacks | artificials], rows sign-normalized to b >= 0.
    Index num_slack = 0;
    for (auto s : problem.row_senses)
        if (s != RowSense::Equal) ++num_slack;

    std::vector<Scalar> row_sign(static_cast<std::size_t>(m), Scalar(1));
    std::vector<Index> slack_col(static_cast<std::size_t>(m), -1);
    Matrix core = Matrix::Zero(m, n + num_slack);
    core.leftCols(n) = problem.constraint_matrix;
    Vector b_eq = b;
    {
        Index next = n;
        for (Index i = 0; i < m; ++i) {
            const auto sense = problem.row_senses[static_cast<std::size_t>(i)];
            if (sense == RowSense::LessEqual) core(i, next) = Scalar(1);
            if (sense == RowSense::GreaterEqual) core(i, next) = Scalar(-1);
            if (sense != RowSense::Equal) slack_col[static_cast<std::size_t>(i)] = next++;
            if (b_eq(i) < Scalar(0)) {
                row_sign[static_cast<std::size_t>(i)] = Scalar(-1);
                core.row(i) *= Scalar(-1);
                b_eq(i) = -b_eq(i);
            }
        }
    }

    std::vector<Index> basis(static_cast<std::size_t>(m), -1);
    std::vector<Index> artificial_rows;
    for (Index i = 0; i < m; ++i) {
        const Index s = slack_col[static_cast<std::size_t>(i)];
        if (s >= 0 && core(i, s) > Scalar(0))
            basis[static_cast<std::size_t>(i)] = s;
        else
            artificial_rows.push_back(i);
    }
    const Index num_core = n + num_slack;
    const Index num_art = static_cast<Index>(artificial_rows.size());
    Matrix a_eq = Matrix::Zero(m, num_core + num_art);
    a_eq.leftCols(num_core) = core;
    for (Index k = 0; k < num_art; ++k) {
        const Index i = artificial_rows[static_cast<std::size_t>(k)];
        a_eq(i, num_core + k) = Scalar(1);
        basis[static_cast<std::size_t>(i)] = num_core + k;
    }

    const int max_iter = opt.max_iterations > 0
                             ? opt.max_iterations
                             : static_cast<int>(std::min<Index>(1000000, 100 * (m + num_core + num_art) + 1000));
    detail::Tableau<Scalar> tab(a_eq, b_eq, basis, opt);

    // Phase 1: minimize the sum of artificials.
    if (num_art > 0) {
        Vector c1 = Vector::Zero(num_core + num_art);
        c1.tail(num_art).setOnes();
        tab.set_costs(c1);
        const auto outcome = tab.run(max_iter, sol.iterations);
        if (outcome != detail::Tableau<Scalar>::Outcome::Optimal) return fail("phase 1 iteration limit");
        const Scalar infeas = tab.objective();
        if (infeas > opt.feasibility_tol * (Scalar(1) + b_eq.cwiseAbs().maxCoeff())) {
            sol.status = Status::Infeasible;
            return sol;
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are redundant and keep their artificial at zero.
        for (Index r = 0; r < m; ++r) {
            if (tab.basis()[static_cast<std::size_t>(r)] < num_core) continue;
            Index best = -1;
            Scalar best_abs = opt.pivot_tol;
            for (Index j = 0; j < num_core; ++j) {
                const Scalar a = std::abs(tab.tab()(r, j));
                if (a > best_abs) {
                    best_abs = a;
                    best = j;
                }
            }
            if (best >= 0) tab.pivot(r, best);
        }
        for (Index k = 0; k < num_art; ++k) tab.bar(num_core + k);
    }

    // Phase 2. Each time the simplex stops, the basis is refactorized with an
    // LU to recover accurate primal and dual vectors; if those fail
    // verification the tableau is rebuilt from the LU and the iterations
    // resume, a bounded number of times.
    Vector c2 = Vector::Zero(num_core + num_art);
    c2.head(n) = problem.costs;
    tab.set_costs(c2);
    const Matrix a_core = a_eq.leftCols(num_core);
    const char* failure = nullptr;
    for (int attempt = 0; attempt <= detail::kMaxRefactorizations; ++attempt) {
        if (attempt > 0 && !tab.reinvert(a_eq, b_eq)) return fail("singular basis on refactorization");
        const auto outcome = tab.run(max_iter, sol.iterations);
        if (outcome == detail::Tableau<Scalar>::Outcome::Unbounded) {
            sol.status = Status::Unbounded;
            return sol;
        }
        if (outcome != detail::Tableau<Scalar>::Outcome::Optimal) return fail("phase 2 iteration limit");

        const auto& final_basis = tab.basis();
        Matrix basis_mat(m, m);
        Vector cb(m);
        for (Index r = 0; r < m; ++r) {
            const Index j = final_basis[static_cast<std::size_t>(r)];
            basis_mat.col(r) = a_eq.col(j);
            cb(r) = c2(j);
        }
        Vector x_full = Vector::Zero(num_core + num_art);
        Vector y_eq = Vector::Zero(m);
        if (m > 0) {
            Eigen::FullPivLU<Matrix> lu(basis_mat);
            if (!lu.isInvertible()) return fail("singular final basis");
            const Vector xb = lu.solve(b_eq);
            y_eq = lu.transpose().solve(cb);
            if (!xb.allFinite() || !y_eq.allFinite()) return fail("non-finite basic solution");
            for (Index r = 0; r < m; ++r) x_full(final_basis[static_cast<std::size_t>(r)]) = xb(r);
        }

        failure = nullptr;
        const Scalar x_scale = std::max(Scalar(1), x_full.size() ? x_full.cwiseAbs().maxCoeff() : Scalar(0));
        for (Index j = 0; j < x_full.size(); ++j) {
            if (x_full(j) < Scalar(0)) {
                if (x_full(j) < -opt.feasibility_tol * x_scale) failure = "negative basic variable";
                x_full(j) = Scalar(0);
            }
        }
        sol.primal = x_full.head(n) + lower;
        sol.dual.resize(m);
        for (Index i = 0; i < m; ++i) sol.dual(i) = row_sign[static_cast<std::size_t>(i)] * y_eq(i);
        sol.objective = problem.costs.dot(sol.primal);

        // Residuals are judged against the magnitude of the terms being
        // summed, so solutions with large entries are not rejected for
        // rounding alone.
        const Vector ax = problem.constraint_matrix * sol.primal;
        const Vector term_mag = problem.constraint_matrix.cwiseAbs() * sol.primal.cwiseAbs();
        for (Index i = 0; i < m && !failure; ++i) {
            const Scalar slack = ax(i) - problem.rhs(i);
            const auto sense = problem.row_senses[static_cast<std::size_t>(i)];
            const Scalar viol = sense == RowSense::LessEqual      ? std::max(Scalar(0), slack)
                                : sense == RowSense::GreaterEqual ? std::max(Scalar(0), -slack)
                                                                  : std::abs(slack);
            if (viol > opt.feasibility_tol * std::max(Scalar(1), term_mag(i))) failure = "primal row violation";
        }
        if (!failure && num_core > 0) {
            const Vector reduced = c2.head(num_core) - a_core.transpose() * y_eq;
            const Vector dual_mag = a_core.cwiseAbs().transpose() * y_eq.cwiseAbs();
            std::vector<bool> is_basic(static_cast<std::size_t>(num_core + num_art), false);
            for (Index j : final_basis) is_basic[static_cast<std::size_t>(j)] = true;
            // Basic columns price to zero by construction; what is left there
            // is LU rounding.
            for (Index j = 0; j < num_core; ++j)
                if (!is_basic[static_cast<std::size_t>(j)] &&
                    reduced(j) < -opt.optimality_tol * std::max(Scalar(1), dual_mag(j)))
                    failure = "dual infeasible reduced cost";
        }
        if (!failure) break;
    }
    if (failure) return fail(failure);

    // Strong duality; with shifted bounds the dual objective is b'^T y + c^T l.
    const Scalar dual_obj = b.dot(sol.dual) + cost_offset;
    if (std::abs(sol.objective - dual_obj) > Scalar(1e-7) * (Scalar(1) + std::abs(sol.objective)))
        return fail("duality gap");

    sol.status = Status::Optimal;
    return sol;
}

}  // namespace srr::lp
