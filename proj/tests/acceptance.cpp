// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "srr/bench.hpp"
#include "srr/csv.hpp"
#include "srr/milp.hpp"
#include "srr/model_io.hpp"
#include "srr/simplex.hpp"
#include "srr/tube_lp.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

using namespace srr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

std::map<int, std::string> lines;

void report(int id, bool ok, const std::string& detail)
{
    lines[id] = "criterion " + std::to_string(id) + ": " + (ok ? "PASS" : "FAIL") + "  " + detail;
    std::cerr << lines[id] << std::endl;
    if (!ok) ++failures;
}

FitConfig config(double delta, double c)
{
    FitConfig cfg;
    cfg.delta = delta;
    cfg.c = c;
    return cfg;
}

struct Instance {
    Dataset data;
    FitConfig cfg;
};

std::vector<Instance> oracle_instances()
{
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> pick_m(4, 12), pick_n(1, 5), pick_d(0, 2), pick_c(0, 3);
    const double deltas[] = {0.0, 0.1, 0.5};
    const double cs[] = {0.0, 0.1, 0.25, 0.5};
    std::vector<Instance> out;
    for (int t = 0; t < 200; ++t) {
        const Index m = pick_m(rng);
        const Index n = pick_n(rng);
        const double delta = deltas[pick_d(rng)];
        const double c = cs[pick_c(rng)];
        out.push_back({oracle::random_instance(rng, m, n), config(delta, c)});
    }
    return out;
}

double objective_or_inf(const FitResult& r)
{
    return r.optimal() ? r.objective : std::numeric_limits<double>::infinity();
}

// ---- criteria 1, 2, 7 share the oracle instances

void oracle_criteria(const std::vector<Instance>& cases)
{
    int mismatched = 0, inlier_bad = 0, optimal = 0;
    std::vector<FitResult> fits;
    const auto t0 = Clock::now();
    for (const auto& c : cases) {
        const auto r = fit(c.data, c.cfg);
        const auto ref = enumerate_exact(c.data, c.cfg);
        const bool same = r.status == ref.status &&
                          (!r.optimal() || std::abs(r.objective - ref.objective) <= 1e-6);
        if (!same) ++mismatched;
        fits.push_back(r);
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream d1;
    d1 << mismatched << "/200 mismatched, " << elapsed << " s (limit 60)";
    report(1, mismatched == 0 && elapsed < 60.0, d1.str());

    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!fits[i].optimal()) continue;
        ++optimal;
        const Index m = cases[i].data.rows();
        const Index need = m - cases[i].cfg.outlier_budget(m);
        if (inlier_count(fits[i].model, cases[i].data, cases[i].cfg.delta, 1e-9) < need) ++inlier_bad;
    }
    std::ostringstream d2;
    d2 << inlier_bad << " violations over " << optimal << " optimal fits";
    report(2, inlier_bad == 0 && optimal > 0, d2.str());

    int row_bad = 0, trip_bad = 0, exported = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!fits[i].optimal()) continue;
        ++exported;
        try {
            const auto ex = export_milp(cases[i].data, cases[i].cfg);
            const auto back = read_lp_format(ex.text);
            if (!back.equivalent(ex.model) || write_lp_format(back) != ex.text) ++trip_bad;
            if (!violated_rows(ex.model, export_assignment(fits[i]), 1e-9).empty()) ++row_bad;
        } catch (const std::exception&) {
            ++row_bad;
        }
    }
    std::ostringstream d7;
    d7 << exported << " exports, " << row_bad << " with violated rows, " << trip_bad << " failed round trips";
    report(7, row_bad == 0 && trip_bad == 0 && exported > 0, d7.str());
}

// ---- criterion 3

void monotonicity()
{
    std::mt19937_64 rng(777);
    const double deltas[] = {0.0, 0.05, 0.1, 0.3, 0.6};
    const double cs[] = {0.0, 0.1, 0.25, 0.5};
    int bad = 0;
    for (int t = 0; t < 20; ++t) {
        const auto d = oracle::random_instance(rng, 6 + t % 5, 1 + t % 4);
        for (double c : cs) {
            double prev = std::numeric_limits<double>::infinity();
            for (double delta : deltas) {
                const double o = objective_or_inf(fit(d, config(delta, c)));
                if (o > prev + 1e-9) ++bad;
                prev = o;
            }
        }
        for (double delta : deltas) {
            double prev = std::numeric_limits<double>::infinity();
            for (double c : cs) {
                const double o = objective_or_inf(fit(d, config(delta, c)));
                if (o > prev + 1e-9) ++bad;
                prev = o;
            }
        }
    }
    report(3, bad == 0, std::to_string(bad) + " increases over 20 instances x (4 delta paths + 5 C paths)");
}

// ---- criterion 4

void scale_equivariance()
{
    // Draw until 20 instances have a finite optimum at the base scale.
    std::mt19937_64 rng(4242);
    int bad = 0, used = 0;
    for (int t = 0; used < 20 && t < 1000; ++t) {
        const auto d = oracle::random_instance(rng, 6 + t % 6, 1 + t % 4);
        const auto cfg = config(0.1 * (1 + t % 3), 0.25);
        const auto base = fit(d, cfg);
        if (!base.optimal()) continue;
        ++used;
        Dataset scaled = d;
        scaled.response *= 3.0;
        const auto big = fit(scaled, config(3.0 * cfg.delta, cfg.c));
        const double expect = 3.0 * base.objective;
        const double err = std::abs(big.objective - expect);
        if (!big.optimal() || (err > 1e-9 * std::abs(expect) && err > 1e-12)) ++bad;
    }
    report(4, bad == 0 && used == 20, std::to_string(bad) + " mismatches over " + std::to_string(used) + " instances");
}

// ---- criterion 5

double duality_gap(const lp::Problem<double>& p, const lp::Solution<double>& s)
{
    const Eigen::VectorXd reduced = p.costs - p.constraint_matrix.transpose() * s.dual;
    const Eigen::VectorXd lower =
        p.variable_lower_bounds.size() ? p.variable_lower_bounds : Eigen::VectorXd::Zero(p.num_cols());
    return std::abs(p.costs.dot(s.primal) - (p.rhs.dot(s.dual) + reduced.dot(lower)));
}

void lp_correctness()
{
    bool analytic = true;
    {
        MatrixX<double> x = MatrixX<double>::Ones(3, 2);
        const VectorX<double> y = VectorX<double>::Constant(3, 9.0);
        const std::vector<Index> none;
        const auto t = solve_tube(x, y, none, 0.1, VectorX<double>::Ones(2));
        analytic &= t.status == lp::Status::Optimal && std::abs(t.objective) <= 1e-9;
    }
    {
        MatrixX<double> x(2, 1);
        x << 1, 2;
        const VectorX<double> y = Eigen::Vector2d(2, 4);
        const std::vector<Index> rows = {0, 1};
        const auto t = solve_tube(x, y, rows, 0.144, VectorX<double>::Ones(1));
        analytic &= t.status == lp::Status::Optimal && std::abs(t.objective - 1.928) <= 1e-9 &&
                    std::abs(t.weights(0) - 1.928) <= 1e-9;
    }
    {
        MatrixX<double> x = MatrixX<double>::Ones(2, 1);
        const VectorX<double> y = Eigen::Vector2d(0, 1);
        const std::vector<Index> rows = {0, 1};
        analytic &= solve_tube(x, y, rows, 0.2, VectorX<double>::Ones(1)).status == lp::Status::Infeasible;
    }

    // Random LPs feasible by construction (rhs from a nonnegative point) and
    // bounded by construction (costs from a sign-correct dual plus slack).
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
    std::uniform_int_distribution<int> pick_sense(0, 2), pick_size(1, 20);
    int gap_bad = 0, not_optimal = 0;
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const Eigen::Index rows = pick_size(rng);
        const Eigen::Index cols = pick_size(rng);
        lp::Problem<double> p;
        p.constraint_matrix = Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return u(rng); });
        const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(cols, [&] { return pos(rng) < 0.4 ? 0.0 : pos(rng); });
        const Eigen::VectorXd ax = p.constraint_matrix * x0;
        p.rhs.resize(rows);
        Eigen::VectorXd y(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const int s = pick_sense(rng);
            if (s == 0) {
                p.row_senses.push_back(lp::RowSense::LessEqual);
                p.rhs(i) = ax(i) + pos(rng);
                y(i) = -pos(rng);
            } else if (s == 1) {
                p.row_senses.push_back(lp::RowSense::GreaterEqual);
                p.rhs(i) = ax(i) - pos(rng);
                y(i) = pos(rng);
            } else {
                p.row_senses.push_back(lp::RowSense::Equal);
                p.rhs(i) = ax(i);
                y(i) = u(rng);
            }
        }
        p.costs = p.constraint_matrix.transpose() * y +
                  Eigen::VectorXd::NullaryExpr(cols, [&] { return pos(rng); });
        const auto s = lp::solve(p);
        if (s.status != lp::Status::Optimal) {
            ++not_optimal;
            continue;
        }
        const double gap = duality_gap(p, s);
        worst = std::max(worst, gap / (1.0 + std::abs(s.objective)));
        if (gap > 1e-7 * (1.0 + std::abs(s.objective))) ++gap_bad;
    }
    std::ostringstream d;
    d << "analytic " << (analytic ? "ok" : "wrong") << ", random: " << not_optimal << " not optimal, " << gap_bad
      << " gap violations, worst relative gap " << worst;
    report(5, analytic && gap_bad == 0 && not_optimal == 0, d.str());
}

// ---- criterion 6

void desk_benchmark()
{
    const auto t0 = Clock::now();
    int wins = 0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        GenSpec spec;
        spec.seed = static_cast<std::uint64_t>(s);
        const auto g = generate(spec);
        const auto rep = compare(g.data, config(0.144, 0.10), LassoGrid{}, 5, spec.seed);
        if (rep.find(kSparseRobustName)->mse <= rep.find(kLassoName)->mse) ++wins;
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream d;
    d << "sparse-robust MSE <= lasso MSE in " << wins << "/" << seeds << " seeds (need 24), " << elapsed
      << " s (limit 600)";
    report(6, wins >= 24 && elapsed <= 600.0, d.str());
}

// ---- criterion 8

int run_cli(const std::string& args, const fs::path& stdout_file)
{
    const std::string cmd = std::string("\"") + SRR_CLI_PATH + "\" " + args + " > \"" + stdout_file.string() +
                            "\" 2> /dev/null";
    return std::system(cmd.c_str());
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void cli_determinism()
{
    const fs::path dir = fs::temp_directory_path() / "srr_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> problems;
    try {
        const auto data = dir / "d.csv";
        if (run_cli("gen --m 40 --n 6 --k 2 --outliers 4 --seed 9 --out " + q(data), dir / "o0") != 0)
            problems.push_back("gen failed");
        const std::string fit_args = "fit --data " + q(data) + " --delta 0.144 --c 0.1 --standardize --intercept";
        if (run_cli(fit_args + " --out " + q(dir / "m.json"), dir / "o1") != 0) problems.push_back("fit failed");
        if (run_cli("predict --model " + q(dir / "m.json") + " --data " + q(data) + " --out " + q(dir / "p.csv"),
                    dir / "o2") != 0)
            problems.push_back("predict failed");

        const Dataset d = ingest_csv(data, "y");
        FitConfig cfg = config(0.144, 0.1);
        cfg.standardize = true;
        cfg.fit_intercept = true;
        const VectorX<double> expected = predict_rows(fit(d, cfg).model, d.features);
        const auto preds = parse_csv(read_text_file(dir / "p.csv"));
        const VectorX<double> loaded = predict_rows(load_model(dir / "m.json").model, d.features);
        bool exact = static_cast<Index>(preds.rows.size()) == d.rows() && (loaded.array() == expected.array()).all();
        for (Index i = 0; exact && i < d.rows(); ++i)
            exact = std::stod(preds.rows[static_cast<std::size_t>(i)][0]) == expected(i);
        if (!exact) problems.push_back("predictions differ from in-memory fit");

        const std::vector<std::pair<std::string, std::vector<std::string>>> seeded = {
            {"gen --seed 21 --truth " + q(dir / "TRUTH"), {"TRUTH"}},
            {"gen --seed 21 --m 12 --n 3 --k 1 --outliers 2 --out " + q(dir / "DATA"), {"DATA"}},
            {"compare --seed 4 --m 40 --n 8 --grid-points 8 --csv " + q(dir / "CSV"), {"CSV"}},
            {"compare --seed 4 --repeats 2 --m 30 --n 5 --k 2 --outliers 3 --threads 2", {}},
        };
        int k = 0;
        for (const auto& [args, files] : seeded) {
            std::vector<std::string> runs;
            for (int rep = 0; rep < 2; ++rep) {
                std::string a = args;
                for (const auto& f : files) {
                    const auto pos = a.find(f);
                    a.replace(pos, f.size(), f + std::to_string(rep));
                }
                const auto out = dir / ("seeded" + std::to_string(k) + "_" + std::to_string(rep));
                if (run_cli(a, out) != 0) problems.push_back("seeded command failed: " + args);
                std::string blob = read_text_file(out);
                for (const auto& f : files) blob += read_text_file(dir / (f + std::to_string(rep)));
                runs.push_back(std::move(blob));
            }
            if (runs[0] != runs[1] || runs[0].empty()) problems.push_back("not deterministic: " + args);
            ++k;
        }
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }
    fs::remove_all(dir);
    std::string detail = problems.empty() ? "predict bit-exact, 4 seeded commands identical across runs" : "";
    for (const auto& p : problems) detail += p + "; ";
    report(8, problems.empty(), detail);
}

}  // namespace

int main()
{
    const auto cases = oracle_instances();
    oracle_criteria(cases);
    monotonicity();
    scale_equivariance();
    lp_correctness();
    desk_benchmark();
    cli_determinism();
    for (const auto& [id, line] : lines) std::cout << line << '\n';
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
